//! The weighted Haar orthonormal basis of the depth-`m` step-function space.
//!
//! The space `F_m` of functions constant on the level-`m` cylinders has
//! dimension `2^m`. Its weighted Haar basis consists of the constant function
//! `φ = 1_C` (index 0) followed by the normalized sibling contrasts
//!
//! ```text
//! e_w = ((1-p) 1_{C_w0} - p 1_{C_w2}) / sqrt(p (1-p) μ(C_w)),   |w| <= m-1,
//! ```
//!
//! in canonical word order, so `e_w` sits at index `2^|w| + bits(w)` and the
//! depth-`m` frame is an initial segment of the depth-`m+1` frame.
//!
//! The second coordinate system used throughout is the normalized level-`m`
//! atom basis `a_w = 1_{C_w} / sqrt(μ(C_w))`, `|w| = m`, indexed by `bits(w)`.
//! Inner products of indicators are exact cylinder-mass sums there, which is
//! why the independent assemblers work in atom coordinates and transport the
//! result with [`atom_change_of_basis`].

use std::fmt;

use faer::Mat;

use crate::error::{Error, Result};
use crate::word::{mass, BranchWeights, Symbol, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisIndex {
    Root,
    Diff(Word),
}

impl BasisIndex {
    /// Position in any frame deep enough to contain it.
    pub fn position(&self) -> usize {
        match self {
            BasisIndex::Root => 0,
            BasisIndex::Diff(w) => (1usize << w.len()) + w.bits() as usize,
        }
    }

    pub fn from_position(pos: usize) -> Self {
        if pos == 0 {
            BasisIndex::Root
        } else {
            let len = (usize::BITS - 1 - pos.leading_zeros()) as usize;
            BasisIndex::Diff(Word::from_bits(len, (pos - (1 << len)) as u64))
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisIndex::Root => f.write_str("-"),
            BasisIndex::Diff(w) => write!(f, "{w}"),
        }
    }
}

pub fn basis_size(m: usize) -> usize {
    1 << m
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarFrame {
    depth: usize,
    weights: BranchWeights,
    index_list: Vec<BasisIndex>,
}

impl HaarFrame {
    pub fn new(depth: usize, weights: BranchWeights) -> Self {
        let index_list = (0..basis_size(depth))
            .map(BasisIndex::from_position)
            .collect();
        HaarFrame {
            depth,
            weights,
            index_list,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn weights(&self) -> &BranchWeights {
        &self.weights
    }

    pub fn size(&self) -> usize {
        self.index_list.len()
    }

    pub fn indices(&self) -> &[BasisIndex] {
        &self.index_list
    }

    pub fn position(&self, idx: &BasisIndex) -> Option<usize> {
        match idx {
            BasisIndex::Diff(w) if w.len() >= self.depth => None,
            _ => Some(idx.position()),
        }
    }

    /// Squared norm of the unnormalized contrast `h_w`: `p(1-p) μ(C_w)`.
    pub fn contrast_norm_sq(&self, w: &Word) -> f64 {
        self.weights.p() * self.weights.one_minus_p() * mass(w, &self.weights)
    }
}

/// Coefficients of the cylinder indicator `1_{C_u}` in the Haar frame.
///
/// Expands recursively from `1_C = φ` using `1_{w0} = p 1_w + h_w` and
/// `1_{w2} = (1-p) 1_w - h_w`, then normalizes `h_w` to `e_w`.
pub fn indicator_to_haar(u: &Word, frame: &HaarFrame) -> Result<Vec<f64>> {
    if u.len() > frame.depth {
        return Err(Error::WordTooLong {
            len: u.len(),
            depth: frame.depth,
        });
    }
    let bw = frame.weights;
    let mut coeffs = vec![0.0; frame.size()];
    coeffs[0] = 1.0;
    let mut node = Word::EMPTY;
    for s in u.symbols() {
        let h_scale = frame.contrast_norm_sq(&node).sqrt();
        let factor = bw.factor(s);
        for c in coeffs.iter_mut() {
            *c *= factor;
        }
        let sign = match s {
            Symbol::Zero => 1.0,
            Symbol::Two => -1.0,
        };
        coeffs[BasisIndex::Diff(node).position()] += sign * h_scale;
        node = node.child(s);
    }
    Ok(coeffs)
}

/// Coordinates of a Haar basis vector on the normalized level-`m` atoms.
fn haar_vector_in_atoms(idx: &BasisIndex, frame: &HaarFrame) -> Vec<f64> {
    let bw = &frame.weights;
    let m = frame.depth;
    Word::level(m)
        .map(|atom| {
            let root_val = mass(&atom, bw).sqrt();
            match idx {
                BasisIndex::Root => root_val,
                BasisIndex::Diff(w) => {
                    if !w.is_prefix_of(&atom) || w.len() >= m {
                        return 0.0;
                    }
                    let norm = frame.contrast_norm_sq(w).sqrt();
                    match atom.symbol(w.len()) {
                        Symbol::Zero => bw.one_minus_p() * root_val / norm,
                        Symbol::Two => -bw.p() * root_val / norm,
                    }
                }
            }
        })
        .collect()
}

/// Orthogonal matrix whose column `j` holds Haar basis vector `j` in
/// normalized-atom coordinates. Haar coordinates `x` map to atoms as `Q x`.
pub fn atom_change_of_basis(frame: &HaarFrame) -> Mat<f64> {
    let n = frame.size();
    let mut q = Mat::zeros(n, n);
    for (j, idx) in frame.index_list.iter().enumerate() {
        for (a, v) in haar_vector_in_atoms(idx, frame).into_iter().enumerate() {
            q[(a, j)] = v;
        }
    }
    q
}

/// `1_{C_u}` directly in normalized-atom coordinates of depth `m >= |u|`.
pub fn indicator_in_atoms(u: &Word, m: usize, bw: &BranchWeights) -> Vec<f64> {
    Word::level(m)
        .map(|atom| {
            if u.is_prefix_of(&atom) {
                mass(&atom, bw).sqrt()
            } else {
                0.0
            }
        })
        .collect()
}
