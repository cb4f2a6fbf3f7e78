//! Finite branch addresses in the binary cylinder tree, cylinder masses under
//! the Bernoulli measure, and the prefix order.
//!
//! A word is a finite string over the alphabet `{0, 2}`. Symbol `0` selects
//! the left branch (mass factor `p`) and `2` the right branch (factor `1 - p`).
//! Words are packed into a `u64` with an explicit length, first symbol in the
//! most significant used bit, so that same-length words compare
//! lexicographically with `0 < 2` by comparing their bit patterns.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest word the packed representation can hold.
pub const MAX_WORD_LEN: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    Two,
}

impl Symbol {
    fn bit(self) -> u64 {
        match self {
            Symbol::Zero => 0,
            Symbol::Two => 1,
        }
    }

    fn from_bit(bit: u64) -> Self {
        if bit & 1 == 0 {
            Symbol::Zero
        } else {
            Symbol::Two
        }
    }
}

/// A finite word over `{0, 2}`.
///
/// Ordering is the canonical order used for every basis and matrix in the
/// crate: by length first, then lexicographically with `0 < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        symbols.into_iter().fold(Word::EMPTY, |w, s| w.child(s))
    }

    /// Reconstructs a word from its length and packed bit pattern.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= MAX_WORD_LEN, "word length {len} too large");
        let mask = if len == 0 { 0 } else { u64::MAX >> (64 - len) };
        Word {
            len: len as u8,
            bits: bits & mask,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of `0` symbols.
    pub fn zeros(&self) -> usize {
        self.len() - self.twos()
    }

    /// Number of `2` symbols.
    pub fn twos(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Symbol at position `i` (0-based from the root).
    pub fn symbol(&self, i: usize) -> Symbol {
        assert!(i < self.len(), "symbol index out of range");
        Symbol::from_bit(self.bits >> (self.len() - 1 - i))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.len()).map(move |i| self.symbol(i))
    }

    /// `w·s`: append a symbol at the leaf end.
    pub fn child(&self, s: Symbol) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "word too long");
        Word {
            len: self.len + 1,
            bits: (self.bits << 1) | s.bit(),
        }
    }

    /// `s·w`: prepend a symbol at the root end.
    pub fn prepend(&self, s: Symbol) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "word too long");
        Word {
            len: self.len + 1,
            bits: (s.bit() << self.len) | self.bits,
        }
    }

    /// Prefix of length `n`.
    pub fn prefix(&self, n: usize) -> Word {
        assert!(n <= self.len(), "prefix longer than word");
        Word {
            len: n as u8,
            bits: self.bits >> (self.len() - n),
        }
    }

    pub fn parent(&self) -> Option<Word> {
        (!self.is_empty()).then(|| self.prefix(self.len() - 1))
    }

    /// True if `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len <= other.len && other.bits >> (other.len - self.len) == self.bits
    }

    pub fn is_comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Position of this word in the canonical enumeration of all words.
    pub fn canonical_index(&self) -> usize {
        (1usize << self.len()) - 1 + self.bits as usize
    }

    /// All words of length exactly `n`, in lexicographic order.
    pub fn level(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < 32, "level {n} too deep to enumerate");
        (0..1u64 << n).map(move |bits| Word::from_bits(n, bits))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then(self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for s in self.symbols() {
            f.write_str(match s {
                Symbol::Zero => "0",
                Symbol::Two => "2",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "-" {
            return Ok(Word::EMPTY);
        }
        if s.len() > MAX_WORD_LEN {
            return Err(Error::Invalid(format!("word '{s}' is too long")));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '2' => Ok(Symbol::Two),
                _ => Err(Error::Invalid(format!("'{c}' is not a branch symbol"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::from_symbols)
    }
}

/// How two words sit relative to each other in the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    /// The first word is a proper prefix of the second.
    PrefixOf,
    /// The second word is a proper prefix of the first.
    ExtensionOf,
    Incomparable,
}

pub fn relation(u: &Word, v: &Word) -> Relation {
    if u == v {
        Relation::Equal
    } else if u.is_prefix_of(v) {
        Relation::PrefixOf
    } else if v.is_prefix_of(u) {
        Relation::ExtensionOf
    } else {
        Relation::Incomparable
    }
}

/// All words of length `<= max_len` in canonical order.
pub fn enumerate_words(max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(Word::level).collect()
}

/// Branch weight parameter pack `(p, 1-p, max{p,1-p}, p^2 + (1-p)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchWeights {
    p: f64,
    one_minus_p: f64,
    alpha: f64,
    q: f64,
}

impl BranchWeights {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidWeight(p));
        }
        let one_minus_p = 1.0 - p;
        Ok(BranchWeights {
            p,
            one_minus_p,
            alpha: p.max(one_minus_p),
            q: p * p + one_minus_p * one_minus_p,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn one_minus_p(&self) -> f64 {
        self.one_minus_p
    }

    /// Largest single-branch factor; the level-`n` mass operator has norm `alpha^n`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Sum of squared branch factors; level-`n` squared masses sum to `q^n`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `1 - q = 2p(1-p)`, computed without cancellation.
    pub fn one_minus_q(&self) -> f64 {
        2.0 * self.p * self.one_minus_p
    }

    pub fn factor(&self, s: Symbol) -> f64 {
        match s {
            Symbol::Zero => self.p,
            Symbol::Two => self.one_minus_p,
        }
    }
}

/// Measure of the cylinder `C_w`: `p^{N_0(w)} (1-p)^{N_2(w)}`.
pub fn mass(w: &Word, bw: &BranchWeights) -> f64 {
    bw.p.powi(w.zeros() as i32) * bw.one_minus_p.powi(w.twos() as i32)
}

/// `sum of mass(u)^2` over the `2^n` descendants `u` of `z` at depth `|z| + n`,
/// in closed form `mass(z)^2 q^n`.
pub fn descendant_square_sum(z: &Word, n: usize, bw: &BranchWeights) -> f64 {
    let m = mass(z, bw);
    m * m * bw.q.powi(n as i32)
}
