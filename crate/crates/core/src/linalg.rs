//! Small dense-matrix helpers shared by the assemblers and checks.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// `max |a_ij - b_ij|`; panics on shape mismatch.
pub fn max_abs_diff(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()), "shape mismatch");
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    worst
}

pub fn max_abs(a: MatRef<'_, f64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max(a[(i, j)].abs());
        }
    }
    worst
}

/// Replaces `a` by `(a + aᵀ)/2` so the stored entries are exactly symmetric.
pub fn symmetrize(a: &mut Mat<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Zero-pads a square matrix to `n × n`, keeping it in the leading block.
pub fn embed(a: MatRef<'_, f64>, n: usize) -> Mat<f64> {
    assert!(a.nrows() <= n && a.ncols() <= n);
    Mat::from_fn(n, n, |i, j| {
        if i < a.nrows() && j < a.ncols() {
            a[(i, j)]
        } else {
            0.0
        }
    })
}

/// `Bᵀ A B`.
pub fn congruence(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let ab = a * b;
    b.transpose() * &ab
}

pub fn trace(a: MatRef<'_, f64>) -> f64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Eigenvalues (ascending) of a symmetric matrix via a tridiagonal QR solver.
/// Used for norms and bounds where eigenvectors are not needed.
pub fn symmetric_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Invalid(format!("eigenvalue solver failed: {e:?}")))
}

/// Operator 2-norm of a symmetric matrix.
pub fn symmetric_norm(a: MatRef<'_, f64>) -> Result<f64> {
    Ok(symmetric_eigenvalues(a)?
        .into_iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs())))
}
