//! Matrix models of the cylinder frame operators.
//!
//! `K_m f = Σ_{|u| <= m} <1_{C_u}, f> 1_{C_u}` is assembled three independent
//! ways: from the closed-form weighted Haar entries, from the raw indicator
//! Gram matrix, and from the filtration sum `Σ D_n E_n`. The limit operator
//! `K_∞` is represented by its compression to a depth-`M` Haar frame.
//! Also here: closed-form spectra and Schatten sums of the symmetric case,
//! the 2×2 compression bound, and the coordinate CSV format.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::haar::{atom_change_of_basis, BasisIndex, HaarFrame};
use crate::linalg::{congruence, symmetrize};
use crate::word::{enumerate_words, mass, relation, BranchWeights, Relation, Symbol, Word};

/// Largest depth for the Gram-matrix oracle.
pub const GRAM_ORACLE_MAX_DEPTH: usize = 8;
/// Largest depth for the filtration assembler.
pub const FILTRATION_MAX_DEPTH: usize = 10;
/// Largest depth for dense assembly of `K_m` or the `K_∞` compression.
pub const DENSE_MAX_DEPTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedForm,
    GramOracle,
    Filtration,
    PsiIteration,
    NeumannSum,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::GramOracle => "gram-oracle",
            Provenance::Filtration => "filtration",
            Provenance::PsiIteration => "psi-iteration",
            Provenance::NeumannSum => "neumann-sum",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Provenance::ClosedForm,
            Provenance::GramOracle,
            Provenance::Filtration,
            Provenance::PsiIteration,
            Provenance::NeumannSum,
        ]
        .into_iter()
        .find(|p| p.tag() == s)
        .ok_or_else(|| Error::Invalid(format!("unknown provenance '{s}'")))
    }
}

/// Which operator a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// The finite frame operator `K_m` restricted to `F_m`.
    Finite,
    /// The compression of `K_∞` to `F_M`.
    LimitCompression,
    Other,
}

/// Dense real symmetric matrix in Haar coordinates of a given depth.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    entries: Mat<f64>,
    depth: usize,
    p: f64,
    provenance: Provenance,
    operator: Operator,
    /// Certified bound on `‖K_∞ - A‖` for the represented operator `A`, when known.
    tail_bound: Option<f64>,
}

impl SymMatrix {
    /// Wraps a square matrix, enforcing exact symmetry of the stored entries.
    pub fn new(mut entries: Mat<f64>, depth: usize, p: f64, provenance: Provenance) -> Result<Self> {
        let n = 1usize << depth;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        symmetrize(&mut entries);
        Ok(SymMatrix {
            entries,
            depth,
            p,
            provenance,
            operator: Operator::Other,
            tail_bound: None,
        })
    }

    pub fn with_operator(mut self, operator: Operator, tail_bound: Option<f64>) -> Self {
        self.operator = operator;
        self.tail_bound = tail_bound;
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }

    pub fn entries(&self) -> MatRef<'_, f64> {
        self.entries.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entry(&self, a: &BasisIndex, b: &BasisIndex) -> f64 {
        self.entries[(a.position(), b.position())]
    }

    pub fn into_entries(self) -> Mat<f64> {
        self.entries
    }

    /// Coordinate CSV: a comment header, a column header, then the nonzero
    /// upper-triangle entries in row-major order.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "# basis=haar depth={} p={} provenance={}",
            self.depth, self.p, self.provenance
        )?;
        writeln!(out, "row,col,value")?;
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let v = self.entries[(i, j)];
                if v != 0.0 {
                    writeln!(out, "{i},{j},{v}")?;
                }
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    /// Parses the coordinate CSV produced by [`SymMatrix::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let bad = |msg: &str| Error::Invalid(format!("matrix CSV: {msg}"));
        let header = lines
            .next()
            .ok_or_else(|| bad("empty input"))?
            .map_err(|e| bad(&e.to_string()))?;
        let mut depth = None;
        let mut p = None;
        let mut provenance = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            match field.split_once('=') {
                Some(("basis", "haar")) => {}
                Some(("basis", other)) => return Err(bad(&format!("unsupported basis {other}"))),
                Some(("depth", v)) => depth = Some(v.parse::<usize>().map_err(|_| bad("depth"))?),
                Some(("p", v)) => p = Some(v.parse::<f64>().map_err(|_| bad("p"))?),
                Some(("provenance", v)) => provenance = Some(v.parse::<Provenance>()?),
                _ => return Err(bad(&format!("unexpected header field '{field}'"))),
            }
        }
        let depth = depth.ok_or_else(|| bad("missing depth"))?;
        if depth > DENSE_MAX_DEPTH {
            return Err(Error::DepthLimit {
                what: "matrix CSV",
                depth,
                max: DENSE_MAX_DEPTH,
            });
        }
        let n = 1usize << depth;
        let mut entries = Mat::zeros(n, n);
        for line in lines {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            if line.is_empty() || line == "row,col,value" {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(i), Some(j), Some(v), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad(&format!("malformed row '{line}'")));
            };
            let i: usize = i.parse().map_err(|_| bad("row index"))?;
            let j: usize = j.parse().map_err(|_| bad("column index"))?;
            let v: f64 = v.parse().map_err(|_| bad("value"))?;
            if i >= n || j >= n || i > j {
                return Err(bad(&format!("index ({i},{j}) outside the upper triangle")));
            }
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
        SymMatrix::new(
            entries,
            depth,
            p.ok_or_else(|| bad("missing p"))?,
            provenance.ok_or_else(|| bad("missing provenance"))?,
        )
    }
}

fn check_depth(what: &'static str, depth: usize, max: usize) -> Result<()> {
    if depth > max {
        Err(Error::DepthLimit { what, depth, max })
    } else {
        Ok(())
    }
}

/// `Σ_{j<k} q^j`.
fn geometric_partial(q: f64, k: usize) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..k {
        sum += term;
        term *= q;
    }
    sum
}

/// Certified bound `α^{m+1}/(1-α)` on `‖K_∞ - K_m‖`.
pub fn truncation_error_bound(p: f64, m: usize) -> Result<f64> {
    let bw = BranchWeights::new(p)?;
    let a = bw.alpha();
    Ok(a.powi(m as i32 + 1) / (1.0 - a))
}

/// Fills a tree-banded Haar matrix from per-node closed forms.
///
/// `root_root`, `root_diff(w)`, `diag(w)` and `chain(u, v, first_symbol_after_u)`
/// give the entries; incomparable pairs are left at exactly `0.0`.
fn fill_tree_banded(
    depth: usize,
    root_root: f64,
    root_diff: impl Fn(&Word) -> f64,
    diag: impl Fn(&Word) -> f64,
    chain: impl Fn(&Word, &Word, Symbol) -> f64,
) -> Mat<f64> {
    let n = 1usize << depth;
    let mut a = Mat::zeros(n, n);
    a[(0, 0)] = root_root;
    if depth == 0 {
        return a;
    }
    for v in enumerate_words(depth - 1) {
        let j = BasisIndex::Diff(v).position();
        let rd = root_diff(&v);
        a[(0, j)] = rd;
        a[(j, 0)] = rd;
        a[(j, j)] = diag(&v);
        for k in 0..v.len() {
            let u = v.prefix(k);
            let i = BasisIndex::Diff(u).position();
            let e = chain(&u, &v, v.symbol(k));
            a[(i, j)] = e;
            a[(j, i)] = e;
        }
    }
    a
}

/// `K_m` in the depth-`m` Haar frame from the closed-form entries.
pub fn assemble_km_closed(p: f64, m: usize) -> Result<SymMatrix> {
    check_depth("closed-form assembly", m, DENSE_MAX_DEPTH)?;
    let bw = BranchWeights::new(p)?;
    let q = bw.q();
    let skew = 2.0 * p - 1.0;
    let sqrt_pq = (p * bw.one_minus_p()).sqrt();
    let g = |w: &Word| geometric_partial(q, m - w.len());
    let entries = fill_tree_banded(
        m,
        geometric_partial(q, m + 1),
        |w| {
            let r = mass(w, &bw).sqrt();
            skew * sqrt_pq * r * r * r * g(w)
        },
        |w| bw.one_minus_q() * mass(w, &bw) * g(w),
        |u, v, s| {
            let sigma = match s {
                Symbol::Zero => bw.one_minus_p(),
                Symbol::Two => -p,
            };
            let rv = mass(v, &bw).sqrt();
            let ru = mass(u, &bw).sqrt();
            sigma * skew * rv * rv * rv / ru * g(v)
        },
    );
    Ok(SymMatrix::new(entries, m, p, Provenance::ClosedForm)?
        .with_operator(Operator::Finite, Some(truncation_error_bound(p, m)?)))
}

/// Compression of `K_∞` to the depth-`M` Haar frame.
pub fn assemble_kinf_truncated(p: f64, depth: usize) -> Result<SymMatrix> {
    check_depth("limit compression", depth, DENSE_MAX_DEPTH)?;
    let bw = BranchWeights::new(p)?;
    let skew = 2.0 * p - 1.0;
    let root_coef = skew / (2.0 * (p * bw.one_minus_p()).sqrt());
    let entries = fill_tree_banded(
        depth,
        1.0 / bw.one_minus_q(),
        |w| root_coef * mass(w, &bw).powf(1.5),
        |w| mass(w, &bw),
        |u, v, s| {
            let coef = match s {
                Symbol::Zero => skew / (2.0 * p),
                Symbol::Two => -skew / (2.0 * bw.one_minus_p()),
            };
            coef * mass(v, &bw).powf(1.5) / mass(u, &bw).sqrt()
        },
    );
    Ok(SymMatrix::new(entries, depth, p, Provenance::ClosedForm)?.with_operator(
        Operator::LimitCompression,
        Some(truncation_error_bound(p, depth)?),
    ))
}

/// Raw indicator Gram matrix `G[u][v] = μ(C_u ∩ C_v)` over all `|u|, |v| <= m`,
/// indexed in canonical word order.
pub fn indicator_gram(m: usize, bw: &BranchWeights) -> Mat<f64> {
    let words = enumerate_words(m);
    let n = words.len();
    Mat::from_fn(n, n, |i, j| match relation(&words[i], &words[j]) {
        Relation::Equal | Relation::PrefixOf => mass(&words[j], bw),
        Relation::ExtensionOf => mass(&words[i], bw),
        Relation::Incomparable => 0.0,
    })
}

/// `K_m` built from the indicator Gram matrix alone, transported to Haar
/// coordinates. Entry `(a, b)` in normalized atoms is
/// `Σ_u G[a][u] G[u][b] / sqrt(μ_a μ_b)`, the frame operator of `{1_{C_u}}`.
pub fn assemble_km_gram_oracle(p: f64, m: usize) -> Result<SymMatrix> {
    check_depth("Gram oracle", m, GRAM_ORACLE_MAX_DEPTH)?;
    let bw = BranchWeights::new(p)?;
    let gram = indicator_gram(m, &bw);
    let atoms: Vec<Word> = Word::level(m).collect();
    let atom_rows: Vec<usize> = atoms.iter().map(Word::canonical_index).collect();
    let n_atoms = atoms.len();
    let n_words = gram.nrows();
    // coordinates of each indicator on the normalized atoms
    let coords = Mat::from_fn(n_atoms, n_words, |a, u| {
        gram[(atom_rows[a], u)] / mass(&atoms[a], &bw).sqrt()
    });
    let k_atoms = &coords * coords.transpose();
    let q = atom_change_of_basis(&HaarFrame::new(m, bw));
    let k = congruence(k_atoms.as_ref(), q.as_ref());
    Ok(SymMatrix::new(k, m, p, Provenance::GramOracle)?
        .with_operator(Operator::Finite, Some(truncation_error_bound(p, m)?)))
}

/// Level-`n` conditional expectation as a matrix on normalized level-`m` atoms.
pub fn conditional_expectation(n: usize, m: usize, bw: &BranchWeights) -> Mat<f64> {
    assert!(n <= m, "level {n} finer than the atom depth {m}");
    let atoms: Vec<Word> = Word::level(m).collect();
    let masses: Vec<f64> = atoms.iter().map(|a| mass(a, bw)).collect();
    Mat::from_fn(atoms.len(), atoms.len(), |a, b| {
        let shift = m - n;
        if atoms[a].bits() >> shift == atoms[b].bits() >> shift {
            (masses[a] * masses[b]).sqrt() / mass(&atoms[a].prefix(n), bw)
        } else {
            0.0
        }
    })
}

/// Multiplication by the level-`n` mass function, diagonal on level-`m` atoms.
pub fn mass_operator(n: usize, m: usize, bw: &BranchWeights) -> Vec<f64> {
    assert!(n <= m);
    Word::level(m).map(|a| mass(&a.prefix(n), bw)).collect()
}

/// `K_m = Σ_{n<=m} D_n E_n`, formed in atom coordinates and transported.
pub fn assemble_km_filtration(p: f64, m: usize) -> Result<SymMatrix> {
    check_depth("filtration assembly", m, FILTRATION_MAX_DEPTH)?;
    let bw = BranchWeights::new(p)?;
    let size = 1usize << m;
    let mut k_atoms = Mat::<f64>::zeros(size, size);
    for n in 0..=m {
        let e = conditional_expectation(n, m, &bw);
        let d = mass_operator(n, m, &bw);
        for j in 0..size {
            for i in 0..size {
                k_atoms[(i, j)] += d[i] * e[(i, j)];
            }
        }
    }
    let q = atom_change_of_basis(&HaarFrame::new(m, bw));
    let k = congruence(k_atoms.as_ref(), q.as_ref());
    Ok(SymMatrix::new(k, m, p, Provenance::Filtration)?
        .with_operator(Operator::Finite, Some(truncation_error_bound(p, m)?)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueGroup {
    pub value: f64,
    pub multiplicity: u64,
}

impl EigenvalueGroup {
    fn new(value: f64, multiplicity: u64) -> Self {
        EigenvalueGroup {
            value,
            multiplicity,
        }
    }
}

/// Spectrum of `K_m` at `p = 1/2`, top group first.
pub fn symmetric_closed_spectrum(m: usize) -> Vec<EigenvalueGroup> {
    assert!(m < 63, "depth too large");
    let mut groups = vec![EigenvalueGroup::new(2.0 - 0.5f64.powi(m as i32), 1)];
    for n in 1..=m {
        let value = 0.5f64.powi(n as i32 - 1) * (1.0 - 0.5f64.powi((m - n + 1) as i32));
        groups.push(EigenvalueGroup::new(value, 1 << (n - 1)));
    }
    groups
}

/// Nonzero spectrum of `K_∞` at `p = 1/2` through layer `n_max`, top group first.
pub fn symmetric_kinf_spectrum(n_max: usize) -> Vec<EigenvalueGroup> {
    assert!((1..63).contains(&n_max), "layer count out of range");
    let mut groups = vec![EigenvalueGroup::new(2.0, 1)];
    for n in 1..=n_max {
        groups.push(EigenvalueGroup::new(0.5f64.powi(n as i32 - 1), 1 << (n - 1)));
    }
    groups
}

/// Compression of `K_∞` to `span{φ, e_∅}` and its top eigenvalue.
pub fn compression_2x2(p: f64) -> Result<([[f64; 2]; 2], f64)> {
    let bw = BranchWeights::new(p)?;
    let a = 1.0 / bw.one_minus_q();
    let b = (2.0 * p - 1.0) * (p * bw.one_minus_p()).sqrt() / bw.one_minus_q();
    let half_gap = 0.5 * (a - 1.0);
    let lambda = 0.5 * (a + 1.0) + (half_gap * half_gap + b * b).sqrt();
    Ok(([[a, b], [b, 1.0]], lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenSum {
    Finite(f64),
    Divergent,
}

/// `Σ s_j(K_∞)^r` at `p = 1/2`: `2^r + 1/(1 - 2^{1-r})` for `r > 1`.
pub fn schatten_symmetric_closed(r: f64) -> Result<SchattenSum> {
    if !(r >= 1.0) {
        return Err(Error::SchattenExponent(r));
    }
    if r == 1.0 {
        return Ok(SchattenSum::Divergent);
    }
    Ok(SchattenSum::Finite(2f64.powf(r) + 1.0 / (1.0 - 2f64.powf(1.0 - r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, trace};

    fn w(s: &str) -> BasisIndex {
        BasisIndex::Diff(s.parse().unwrap())
    }

    #[test]
    fn closed_form_examples() {
        let k = assemble_km_closed(0.5, 2).unwrap();
        assert_eq!(k.get(0, 0), 1.75);
        for j in 1..4 {
            assert_eq!(k.get(0, j), 0.0);
        }
        for p in [0.2, 0.5, 0.9] {
            let k = assemble_km_closed(p, 2).unwrap();
            assert_eq!(k.entry(&w("0"), &w("2")), 0.0);
        }
        let k = assemble_km_closed(1.0 / 3.0, 1).unwrap();
        assert!((k.get(0, 0) - (1.0 + 5.0 / 9.0)).abs() < 1e-15);
        let k0 = assemble_km_closed(0.3, 0).unwrap();
        assert_eq!(k0.dim(), 1);
        assert_eq!(k0.get(0, 0), 1.0);
    }

    #[test]
    fn kinf_examples() {
        let k = assemble_kinf_truncated(0.5, 4).unwrap();
        assert_eq!(k.get(0, 0), 2.0);
        for idx in HaarFrame::new(4, BranchWeights::new(0.5).unwrap()).indices().iter().skip(1) {
            let BasisIndex::Diff(word) = idx else { unreachable!() };
            assert_eq!(k.get(0, idx.position()), 0.0);
            assert_eq!(k.entry(idx, idx), 0.5f64.powi(word.len() as i32));
        }
        for p in [0.1, 0.3, 0.5, 0.8] {
            let k = assemble_kinf_truncated(p, 3).unwrap();
            assert_eq!(k.entry(&w("0"), &w("2")), 0.0);
        }
        let k = assemble_kinf_truncated(1.0 / 3.0, 2).unwrap();
        assert!((k.get(0, 0) - 2.25).abs() < 1e-14);
    }

    #[test]
    fn small_gram_oracle() {
        let k = assemble_km_gram_oracle(0.37, 0).unwrap();
        assert!((k.get(0, 0) - 1.0).abs() < 1e-15);
        let a = assemble_km_gram_oracle(0.5, 2).unwrap();
        let b = assemble_km_closed(0.5, 2).unwrap();
        assert!(max_abs_diff(a.entries(), b.entries()) < 1e-12);

        let p = 0.3;
        let bw = BranchWeights::new(p).unwrap();
        let g = indicator_gram(2, &bw);
        let u: Word = "0".parse().unwrap();
        let v: Word = "02".parse().unwrap();
        let got = g[(u.canonical_index(), v.canonical_index())];
        assert!((got - p * (1.0 - p)).abs() < 1e-15);
        assert!(matches!(
            assemble_km_gram_oracle(0.3, 9),
            Err(Error::DepthLimit { .. })
        ));
    }

    #[test]
    fn filtration_pieces() {
        let bw = BranchWeights::new(0.3).unwrap();
        for n in 0..=4 {
            let e = conditional_expectation(n, 4, &bw);
            let ee = &e * &e;
            assert!(max_abs_diff(ee.as_ref(), e.as_ref()) < 1e-12);
            let d = mass_operator(n, 4, &bw);
            let norm = d.iter().cloned().fold(0.0, f64::max);
            assert!((norm - 0.7f64.powi(n as i32)).abs() < 1e-15);
        }
        let k = assemble_km_filtration(0.5, 3).unwrap();
        let half = BranchWeights::new(0.5).unwrap();
        let mut sum = Mat::<f64>::zeros(8, 8);
        for n in 0..=3 {
            let e = conditional_expectation(n, 3, &half);
            sum += 0.5f64.powi(n as i32) * &e;
        }
        let q = atom_change_of_basis(&HaarFrame::new(3, half));
        let sum = congruence(sum.as_ref(), q.as_ref());
        assert!(max_abs_diff(k.entries(), sum.as_ref()) < 1e-12);
    }

    #[test]
    fn bounds_and_spectra() {
        assert!((truncation_error_bound(0.5, 3).unwrap() - 0.125).abs() < 1e-15);
        assert!((truncation_error_bound(1.0 / 3.0, 2).unwrap() - 8.0 / 9.0).abs() < 1e-14);
        let b: Vec<f64> = (0..20).map(|m| truncation_error_bound(0.8, m).unwrap()).collect();
        assert!(b.windows(2).all(|w| w[1] < w[0]));

        assert_eq!(symmetric_closed_spectrum(0), vec![EigenvalueGroup::new(1.0, 1)]);
        assert_eq!(
            symmetric_closed_spectrum(2),
            vec![
                EigenvalueGroup::new(1.75, 1),
                EigenvalueGroup::new(0.75, 1),
                EigenvalueGroup::new(0.25, 2)
            ]
        );
        let kinf = symmetric_kinf_spectrum(3);
        assert_eq!(kinf[0], EigenvalueGroup::new(2.0, 1));
        assert_eq!(kinf[1], EigenvalueGroup::new(1.0, 1));
        assert_eq!(kinf[3], EigenvalueGroup::new(0.25, 4));
        for m in 0..10 {
            let total: u64 = symmetric_closed_spectrum(m).iter().map(|g| g.multiplicity).sum();
            assert_eq!(total, 1 << m);
        }
    }

    #[test]
    fn two_by_two() {
        let (mat, lam) = compression_2x2(0.5).unwrap();
        assert_eq!(mat, [[2.0, 0.0], [0.0, 1.0]]);
        assert_eq!(lam, 2.0);
        let (mat, lam) = compression_2x2(1.0 / 3.0).unwrap();
        assert!((mat[0][0] - 2.25).abs() < 1e-14);
        assert!((mat[0][1] + 0.353_553_390_593_273_8).abs() < 1e-14);
        assert!((lam - 2.343_07).abs() < 1e-5);
        // 2×2 eigensolve by characteristic polynomial
        let (a, b, d) = (mat[0][0], mat[0][1], mat[1][1]);
        let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
        assert!((lam - 0.5 * (a + d + disc)).abs() < 1e-13);
    }

    #[test]
    fn schatten_closed() {
        assert_eq!(schatten_symmetric_closed(2.0).unwrap(), SchattenSum::Finite(6.0));
        assert_eq!(schatten_symmetric_closed(1.0).unwrap(), SchattenSum::Divergent);
        assert!(schatten_symmetric_closed(0.5).is_err());
        let SchattenSum::Finite(s) = schatten_symmetric_closed(200.0).unwrap() else {
            panic!()
        };
        assert!((s.powf(1.0 / 200.0) - 2.0).abs() < 1e-2);
    }

    #[test]
    fn trace_is_level_count() {
        for p in [0.2, 0.5, 0.73] {
            for m in 0..=6 {
                let k = assemble_km_closed(p, m).unwrap();
                assert!((trace(k.entries()) - (m + 1) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let k = assemble_km_closed(0.3, 3).unwrap();
        let text = k.to_csv_string();
        assert!(text.starts_with("# basis=haar depth=3 p=0.3 provenance=closed-form\nrow,col,value\n"));
        let back = SymMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(max_abs_diff(k.entries(), back.entries()), 0.0);
        assert_eq!(back.provenance(), Provenance::ClosedForm);
        assert!(SymMatrix::read_csv("# basis=haar depth=1 p=0.5 provenance=closed-form\n1,0,2\n".as_bytes()).is_err());
    }
}
