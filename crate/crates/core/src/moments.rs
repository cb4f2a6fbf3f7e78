//! Moments of the rooted spectral measure and the resolvent renormalization.
//!
//! The rooted resolvent `m(z) = Σ μ_n z^{-(n+1)}` satisfies
//!
//! ```text
//! m(z) = A/(1-A) + B/((1-A)(1-A-B)),   A = m(z/p),  B = m(z/(1-p)),
//! ```
//!
//! which determines every `μ_n` from the lower ones.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::pow;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::{assemble_km_closed, truncation_error_bound};
use crate::linalg::symmetric_eigenvalues;
use crate::series::{LaurentTail, Scalar};
use crate::spectral::{limit_spectral_data, resolvent_value, SpectralData};

pub const ORACLE_MAX_DEPTH: usize = 10;
pub const ORACLE_MAX_ORDER: usize = 8;

/// A branch weight as typed by the user: `"num/den"` or a decimal.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Fraction(BigRational),
    Decimal(f64),
}

impl WeightSpec {
    pub fn to_f64(&self) -> f64 {
        match self {
            WeightSpec::Fraction(r) => Scalar::to_f64(r),
            WeightSpec::Decimal(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            WeightSpec::Fraction(r) => Some(r),
            WeightSpec::Decimal(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            WeightSpec::Fraction(r) => Value::String(r.to_string()),
            WeightSpec::Decimal(x) => json!(x),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = if s.contains('/') {
            let r = BigRational::from_str(s)
                .map_err(|_| Error::Invalid(format!("cannot parse fraction {s:?}")))?;
            WeightSpec::Fraction(r)
        } else {
            let x = s
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("cannot parse number {s:?}")))?;
            WeightSpec::Decimal(x)
        };
        let x = spec.to_f64();
        let inside = match &spec {
            WeightSpec::Fraction(r) => {
                *r > BigRational::from_i64(0) && *r < BigRational::from_i64(1)
            }
            WeightSpec::Decimal(x) => *x > 0.0 && *x < 1.0,
        };
        if inside {
            Ok(spec)
        } else {
            Err(Error::InvalidWeight(x))
        }
    }
}

/// `μ_0..μ_N` for branch weight `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<S> {
    pub p: S,
    pub values: Vec<S>,
}

impl<S: Scalar> MomentSequence<S> {
    /// `{"p", "mode", "mu"}` with `p` echoed as given.
    pub fn to_json(&self, p: &WeightSpec) -> Value {
        json!({
            "p": p.to_json(),
            "mode": S::MODE.tag(),
            "mu": self.values.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }
}

fn check_weight<S: Scalar>(p: &S) -> Result<()> {
    if *p > S::zero() && *p < S::one() {
        Ok(())
    } else {
        Err(Error::InvalidWeight(p.to_f64()))
    }
}

/// `m(z/c)` as a tail of order `order`: coefficient `k` is `μ_{k-1} c^k`,
/// with moments beyond the known ones set to zero.
fn scaled_resolvent<S: Scalar>(mu: &[S], c: &S, order: usize) -> LaurentTail<S> {
    let mut coeffs = Vec::with_capacity(order);
    let mut power = c.clone();
    for k in 1..=order {
        let m = mu.get(k - 1).cloned().unwrap_or_else(S::zero);
        coeffs.push(m * power.clone());
        power = power * c.clone();
    }
    LaurentTail::from_coeffs(coeffs)
}

/// Right side of the renormalization identity as a tail.
pub fn renormalization_series<S: Scalar>(mu: &[S], p: &S, order: usize) -> Result<LaurentTail<S>> {
    let q = S::one() - p.clone();
    let a = scaled_resolvent(mu, p, order);
    let b = scaled_resolvent(mu, &q, order);
    let a_geo = a.inv_one_minus();
    let t = a.add(&b)?.inv_one_minus();
    // b/((1-a)(1-a-b)) = b (1 + a_geo)(1 + t)
    let b_term = b.add(&b.mul(&a_geo)?)?;
    let second = b_term.add(&b_term.mul(&t)?)?;
    a_geo.add(&second)
}

/// Moments `μ_0..μ_N` from the renormalization identity.
///
/// With `μ_n` set to zero in `A` and `B`, the `z^{-(n+1)}` coefficient of the
/// right side misses exactly `(p^{n+1} + (1-p)^{n+1}) μ_n`, so
/// `μ_n = Q_n / (1 - p^{n+1} - (1-p)^{n+1})`.
pub fn moments_recursive<S: Scalar>(p: &S, n_max: usize) -> Result<MomentSequence<S>> {
    check_weight(p)?;
    let q = S::one() - p.clone();
    let mut mu = vec![S::one()];
    for n in 1..=n_max {
        let rhs = renormalization_series(&mu, p, n + 1)?;
        let denom = S::one() - pow(p.clone(), n + 1) - pow(q.clone(), n + 1);
        mu.push(rhs.coeff(n + 1).clone() / denom);
    }
    Ok(MomentSequence {
        p: p.clone(),
        values: mu,
    })
}

/// Closed forms of `μ_1, μ_2, μ_3`.
pub fn moments_closed<S: Scalar>(p: &S) -> Result<(S, S, S)> {
    check_weight(p)?;
    let n = |v: i64| S::from_i64(v);
    let p = p.clone();
    let q = S::one() - p.clone();
    let pq = p.clone() * q.clone();
    let mu1 = S::one() / (n(2) * pq.clone());
    let mu2 = (p.clone() * p.clone() - p.clone() + S::one()) / (n(3) * pq.clone() * pq.clone());
    let p2 = p.clone() * p.clone();
    let p3 = p2.clone() * p.clone();
    let p4 = p3.clone() * p.clone();
    let num = n(12) * p4 - n(24) * p3 + n(38) * p2.clone() - n(26) * p.clone() + n(11);
    let den = n(24) * pq.clone() * pq.clone() * pq * (p2 - p + n(2));
    Ok((mu1, mu2, num / den))
}

/// `⟨φ, K_M^n φ⟩` for `n = 0..=N` with error bounds `n B^{n-1} τ` against
/// the moments of `K_∞`, where `B = λ_max(K_M) + τ`.
pub fn moments_operator_oracle(p: f64, depth: usize, n_max: usize) -> Result<Vec<(f64, f64)>> {
    if depth > ORACLE_MAX_DEPTH {
        return Err(Error::DepthLimit {
            what: "moment operator oracle",
            depth,
            max: ORACLE_MAX_DEPTH,
        });
    }
    if n_max > ORACLE_MAX_ORDER {
        return Err(Error::Invalid(format!(
            "moment operator oracle supports n <= {ORACLE_MAX_ORDER}, got {n_max}"
        )));
    }
    let k = assemble_km_closed(p, depth)?;
    let tau = truncation_error_bound(p, depth)?;
    let top = symmetric_eigenvalues(k.entries())?
        .last()
        .copied()
        .unwrap_or(0.0);
    let bound = top + tau;
    let dim = k.dim();
    let mut v = vec![0.0; dim];
    v[0] = 1.0;
    let mut out = vec![(1.0, 0.0)];
    for n in 1..=n_max {
        let next: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|j| k.get(i, j) * v[j]).sum())
            .collect();
        v = next;
        out.push((v[0], n as f64 * bound.powi(n as i32 - 1) * tau));
    }
    Ok(out)
}

/// `A/(1-A) + B/((1-A)(1-A-B))`; `None` outside `A < 1, A + B < 1`.
pub fn renormalization_rhs(a: f64, b: f64) -> Option<f64> {
    if a < 1.0 && a + b < 1.0 {
        Some(a / (1.0 - a) + b / ((1.0 - a) * (1.0 - a - b)))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormalizationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
}

impl RenormalizationCheck {
    pub fn holds(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Evaluates both sides at `z` from truncated spectral data.
///
/// The right side is increasing in each of `A, B >= 0` on its domain, so its
/// deviation over the box `[A ± r_A] × [B ± r_B]` is attained at a corner;
/// the tolerance adds that deviation to the radius of `m(z)`.
pub fn renormalization_residual_with(sd: &SpectralData, z: f64) -> Result<RenormalizationCheck> {
    let p = sd.p();
    let limit = sd.certified_spectral_radius() + 1.0;
    if !(z > limit) || !limit.is_finite() {
        return Err(Error::ResolventDomain { z, limit });
    }
    let (m0, r0) = resolvent_value(z, sd)?;
    let (a, ra) = resolvent_value(z / p, sd)?;
    let (b, rb) = resolvent_value(z / (1.0 - p), sd)?;
    let domain = || Error::Invalid(format!("renormalization identity undefined at z = {z}"));
    let rhs = renormalization_rhs(a, b).ok_or_else(domain)?;
    let mut spread = 0.0f64;
    for ca in [(a - ra).max(0.0), a + ra] {
        for cb in [(b - rb).max(0.0), b + rb] {
            let v = renormalization_rhs(ca, cb).ok_or_else(domain)?;
            spread = spread.max((v - rhs).abs());
        }
    }
    let residual = (m0 - rhs).abs();
    let rounding = 64.0 * f64::EPSILON * (m0.abs() + rhs.abs());
    Ok(RenormalizationCheck {
        lhs: m0,
        rhs,
        residual,
        tolerance: r0 + spread + rounding,
    })
}

/// `(residual, certified_tolerance)` on the depth-`M` compression.
pub fn renormalization_residual(p: f64, z: f64, depth: usize) -> Result<(f64, f64)> {
    let sd = limit_spectral_data(p, depth)?;
    let check = renormalization_residual_with(&sd, z)?;
    Ok((check.residual, check.tolerance))
}
