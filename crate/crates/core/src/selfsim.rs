//! Branch isometries and the self-similar fixed-point map.
//!
//! `U_0` and `U_2` transport a function on the whole Cantor set onto the left
//! and right first-level branch. In Haar coordinates they map the depth-`m`
//! frame into the depth-`m+1` frame:
//!
//! ```text
//! U_0 e_w = e_{0w},   U_0 φ = √p φ + √(1-p) e_∅,
//! U_2 e_w = e_{2w},   U_2 φ = √(1-p) φ - √p e_∅.
//! ```
//!
//! `Ψ(T) = P_φ + p U_0 T U_0ᵀ + (1-p) U_2 T U_2ᵀ` then lifts a depth-`m`
//! operator to depth `m+1`; `K_{m+1} = Ψ(K_m)` exactly.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::frame::{assemble_kinf_truncated, Provenance, SymMatrix};
use crate::haar::BasisIndex;
use crate::linalg::{max_abs_diff, symmetric_norm};
use crate::word::{enumerate_words, BranchWeights, Symbol, Word};

#[derive(Debug, Clone)]
pub struct BranchMap {
    branch: Symbol,
    source_depth: usize,
    matrix: Mat<f64>,
}

impl BranchMap {
    pub fn branch(&self) -> Symbol {
        self.branch
    }

    pub fn source_depth(&self) -> usize {
        self.source_depth
    }

    /// `2^{m+1} × 2^m` matrix from the depth-`m` frame into depth `m+1`.
    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    /// `‖UᵀU - I‖_max`.
    pub fn isometry_residual(&self) -> f64 {
        let n = self.matrix.ncols();
        let utu = self.matrix.transpose() * &self.matrix;
        max_abs_diff(utu.as_ref(), Mat::<f64>::identity(n, n).as_ref())
    }
}

pub fn branch_isometry(branch: Symbol, p: f64, m: usize) -> Result<BranchMap> {
    let bw = BranchWeights::new(p)?;
    let (src, dst) = (1usize << m, 1usize << (m + 1));
    let mut u = Mat::zeros(dst, src);
    let root_diff = BasisIndex::Diff(Word::EMPTY).position();
    match branch {
        Symbol::Zero => {
            u[(0, 0)] = bw.p().sqrt();
            u[(root_diff, 0)] = bw.one_minus_p().sqrt();
        }
        Symbol::Two => {
            u[(0, 0)] = bw.one_minus_p().sqrt();
            u[(root_diff, 0)] = -bw.p().sqrt();
        }
    }
    if m > 0 {
        for w in enumerate_words(m - 1) {
            let col = BasisIndex::Diff(w).position();
            let row = BasisIndex::Diff(w.prepend(branch)).position();
            u[(row, col)] = 1.0;
        }
    }
    Ok(BranchMap {
        branch,
        source_depth: m,
        matrix: u,
    })
}

/// Max-abs residuals of the Cuntz relations on the depth-`m` frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuntzReport {
    /// `U_0ᵀU_0 - I`
    pub isometry_0: f64,
    /// `U_2ᵀU_2 - I`
    pub isometry_2: f64,
    /// `U_0ᵀU_2`
    pub orthogonal_ranges: f64,
    /// `U_0U_0ᵀ + U_2U_2ᵀ - I` on the depth-`m+1` frame
    pub completeness: f64,
}

impl CuntzReport {
    pub fn max(&self) -> f64 {
        self.isometry_0
            .max(self.isometry_2)
            .max(self.orthogonal_ranges)
            .max(self.completeness)
    }
}

pub fn cuntz_check(p: f64, m: usize) -> Result<CuntzReport> {
    if m == 0 {
        return Err(Error::Invalid("Cuntz check needs depth m >= 1".into()));
    }
    let u0 = branch_isometry(Symbol::Zero, p, m)?;
    let u2 = branch_isometry(Symbol::Two, p, m)?;
    let cross = u0.matrix.transpose() * &u2.matrix;
    let n = u0.matrix.nrows();
    let sum = &u0.matrix * u0.matrix.transpose() + &u2.matrix * u2.matrix.transpose();
    Ok(CuntzReport {
        isometry_0: u0.isometry_residual(),
        isometry_2: u2.isometry_residual(),
        orthogonal_ranges: crate::linalg::max_abs(cross.as_ref()),
        completeness: max_abs_diff(sum.as_ref(), Mat::<f64>::identity(n, n).as_ref()),
    })
}

fn depth_of(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::Invalid(format!("dimension {dim} is not a power of two")))
    }
}

/// Linear part `Φ(T) = p U_0 T U_0ᵀ + (1-p) U_2 T U_2ᵀ`, lifting one level.
pub fn phi_apply_mat(t: MatRef<'_, f64>, p: f64) -> Result<Mat<f64>> {
    let m = depth_of(t.nrows())?;
    if t.ncols() != t.nrows() {
        return Err(Error::DimensionMismatch {
            expected: t.nrows(),
            got: t.ncols(),
        });
    }
    let u0 = branch_isometry(Symbol::Zero, p, m)?;
    let u2 = branch_isometry(Symbol::Two, p, m)?;
    let a = &u0.matrix * t * u0.matrix.transpose();
    let b = &u2.matrix * t * u2.matrix.transpose();
    Ok(p * a + (1.0 - p) * b)
}

/// `Ψ(T) = P_φ + Φ(T)` on raw matrices.
pub fn psi_apply_mat(t: MatRef<'_, f64>, p: f64) -> Result<Mat<f64>> {
    let mut out = phi_apply_mat(t, p)?;
    out[(0, 0)] += 1.0;
    Ok(out)
}

pub fn psi_apply(t: &SymMatrix, p: f64) -> Result<SymMatrix> {
    let out = psi_apply_mat(t.entries(), p)?;
    SymMatrix::new(out, t.depth() + 1, p, Provenance::PsiIteration)
}

/// `Σ_{n<=N} Φ^n(P_φ)`, each term embedded in the depth-`N` frame.
pub fn neumann_partial_sum(p: f64, n_max: usize) -> Result<SymMatrix> {
    BranchWeights::new(p)?;
    let size = 1usize << n_max;
    let mut sum = Mat::<f64>::zeros(size, size);
    let mut term = Mat::<f64>::zeros(1, 1);
    term[(0, 0)] = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            term = phi_apply_mat(term.as_ref(), p)?;
        }
        let k = term.nrows();
        for j in 0..k {
            for i in 0..k {
                sum[(i, j)] += term[(i, j)];
            }
        }
    }
    SymMatrix::new(sum, n_max, p, Provenance::NeumannSum)
}

/// Measured `‖Ψ(A) - Ψ(B)‖ / ‖A - B‖` in the operator norm.
pub fn psi_lipschitz_ratio(a: MatRef<'_, f64>, b: MatRef<'_, f64>, p: f64) -> Result<f64> {
    let pa = psi_apply_mat(a, p)?;
    let pb = psi_apply_mat(b, p)?;
    let num = symmetric_norm((&pa - &pb).as_ref())?;
    let den = symmetric_norm((a - b).as_ref())?;
    Ok(num / den)
}

/// `W = [U_0 | U_2]` from two depth-`(M-1)` frames onto the depth-`M` frame.
pub fn branch_unitary(p: f64, depth: usize) -> Result<Mat<f64>> {
    if depth == 0 {
        return Err(Error::Invalid("branch unitary needs depth >= 1".into()));
    }
    let u0 = branch_isometry(Symbol::Zero, p, depth - 1)?;
    let u2 = branch_isometry(Symbol::Two, p, depth - 1)?;
    let half = u0.matrix.ncols();
    let n = u0.matrix.nrows();
    Ok(Mat::from_fn(n, n, |i, j| {
        if j < half {
            u0.matrix[(i, j)]
        } else {
            u2.matrix[(i, j - half)]
        }
    }))
}

/// `‖Wᵀ K W - B‖_max` with `K` the depth-`M` compression of `K_∞` and `B`
/// the first-level block form built from the depth-`(M-1)` compression `K'`:
///
/// ```text
/// B = [ pK' + pP_φ        √(p(1-p)) P_φ     ]
///     [ √(p(1-p)) P_φ     (1-p)K' + (1-p)P_φ ]
/// ```
pub fn block_form_residual(p: f64, depth: usize) -> Result<f64> {
    if depth < 2 {
        return Err(Error::Invalid("block form needs depth M >= 2".into()));
    }
    let k = assemble_kinf_truncated(p, depth)?;
    let k_prev = assemble_kinf_truncated(p, depth - 1)?;
    let w = branch_unitary(p, depth)?;
    let lhs = w.transpose() * k.entries() * &w;
    let half = k_prev.dim();
    let q = 1.0 - p;
    let mut block = Mat::<f64>::zeros(2 * half, 2 * half);
    for j in 0..half {
        for i in 0..half {
            block[(i, j)] = p * k_prev.get(i, j);
            block[(half + i, half + j)] = q * k_prev.get(i, j);
        }
    }
    block[(0, 0)] += p;
    block[(half, half)] += q;
    let c = (p * q).sqrt();
    block[(0, half)] = c;
    block[(half, 0)] = c;
    Ok(max_abs_diff(lhs.as_ref(), block.as_ref()))
}
