//! The top eigenvalue of `K_∞` as the root of `m(λ/p) + m(λ/(1-p)) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{limit_spectral_data, resolvent_value, SpectralData};
use crate::word::BranchWeights;

pub const BRACKET_OFFSET: f64 = 1e-6;
pub const SAMPLE_POINTS: usize = 32;
pub const MAX_BISECTIONS: usize = 200;
pub const MIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularSolve {
    pub p: f64,
    pub lambda_star: f64,
    pub bracket: (f64, f64),
    /// `|secular(λ*)|`
    pub residual: f64,
    pub direct_lambda: f64,
    pub combined_tolerance: f64,
    pub tol: f64,
}

impl SecularSolve {
    /// `|λ* - λ_direct| <= combined_tolerance + tol`.
    pub fn agrees(&self) -> bool {
        (self.lambda_star - self.direct_lambda).abs() <= self.combined_tolerance + self.tol
    }
}

/// JSON form of a solve together with the simplicity verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopEigenReport {
    pub p: f64,
    pub lambda_scalar: f64,
    pub lambda_direct: f64,
    pub tolerance: f64,
    pub simple: bool,
    pub agree: bool,
}

impl TopEigenReport {
    pub fn new(solve: &SecularSolve, simplicity: &Simplicity) -> Self {
        TopEigenReport {
            p: solve.p,
            lambda_scalar: solve.lambda_star,
            lambda_direct: solve.direct_lambda,
            tolerance: solve.combined_tolerance,
            simple: simplicity.certified_simple,
            agree: solve.agrees(),
        }
    }
}

/// `m(λ/p) + m(λ/(1-p)) - 1` with the summed resolvent radii.
pub fn secular_value(lambda: f64, sd: &SpectralData, p: f64) -> Result<(f64, f64)> {
    let (a, ra) = resolvent_value(lambda / p, sd)?;
    let (b, rb) = resolvent_value(lambda / (1.0 - p), sd)?;
    Ok((a + b - 1.0, ra + rb))
}

/// Secular root on the spectral data of a depth-`M` compression.
///
/// The bracket is `[α(L + τ) + δ, L + τ + 1]`; both resolvent arguments then
/// exceed `L + τ`. The root is the top eigenvalue of the next-deeper
/// compression, which lies within `τ` of `L`, so `combined_tolerance = τ`.
pub fn solve_top_eigenvalue_with(sd: &SpectralData, tol: f64) -> Result<SecularSolve> {
    if !(tol >= MIN_TOLERANCE) {
        return Err(Error::Invalid(format!(
            "bisection tolerance must be at least {MIN_TOLERANCE:e}, got {tol:e}"
        )));
    }
    let p = sd.p();
    let bw = BranchWeights::new(p)?;
    let top = sd.max_eigenvalue();
    let tau = sd.tail_bound();
    let edge = top + tau;
    if !edge.is_finite() {
        return Err(Error::ResolventDomain { z: f64::NAN, limit: edge });
    }
    let lo = bw.alpha() * edge + BRACKET_OFFSET;
    let hi = edge + 1.0;
    let f = |x: f64| secular_value(x, sd, p).map(|v| v.0);

    let mut changes = 0;
    let mut prev = f(lo)?;
    for i in 1..SAMPLE_POINTS {
        let x = lo + (hi - lo) * i as f64 / (SAMPLE_POINTS - 1) as f64;
        let v = f(x)?;
        if (prev > 0.0) != (v > 0.0) {
            changes += 1;
        }
        prev = v;
    }
    let (mut a, mut b) = (lo, hi);
    if changes != 1 || !(f(a)? > 0.0) || !(f(b)? <= 0.0) {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if f(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let lambda_star = 0.5 * (a + b);
    Ok(SecularSolve {
        p,
        lambda_star,
        bracket: (lo, hi),
        residual: f(lambda_star)?.abs(),
        direct_lambda: top,
        combined_tolerance: tau,
        tol,
    })
}

/// Solves at depth `M` (closed-form spectrum at `p = 1/2`, dense otherwise).
pub fn solve_top_eigenvalue(p: f64, depth: usize, tol: f64) -> Result<SecularSolve> {
    if depth < 4 {
        return Err(Error::Invalid(format!(
            "secular solve needs depth M >= 4, got {depth}"
        )));
    }
    solve_top_eigenvalue_with(&limit_spectral_data(p, depth)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplicity {
    pub gap: f64,
    pub certified_simple: bool,
}

/// Gap below the top eigenvalue; simple when it exceeds twice the tail bound.
pub fn simplicity_report(sd: &SpectralData) -> Simplicity {
    let top = sd.max_eigenvalue();
    let gap = sd.second_eigenvalue().map_or(f64::INFINITY, |s| top - s);
    Simplicity {
        gap,
        certified_simple: gap > 2.0 * sd.tail_bound(),
    }
}
