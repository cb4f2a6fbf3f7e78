//! Truncated Laurent tails `c_1 z^{-1} + … + c_N z^{-N}`.
//!
//! The scalar type fixes the arithmetic mode: `f64` for floating point,
//! [`BigRational`] for exact work. Mixing modes is a type error; mixing
//! orders is reported as [`Error::OrderMismatch`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    Rational,
}

impl Mode {
    pub fn tag(&self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        }
    }
}

/// Field scalars usable in series arithmetic.
pub trait Scalar: Num + Clone + Debug + PartialOrd {
    const MODE: Mode;

    fn to_f64(&self) -> f64;

    fn to_json(&self) -> serde_json::Value;

    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(*self)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Rational;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    /// `"num/den"`, or just `"num"` for integers.
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentTail<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> LaurentTail<S> {
    pub fn zero(order: usize) -> Self {
        LaurentTail {
            coeffs: vec![S::zero(); order],
        }
    }

    /// Coefficients `c_1..c_N`; the order is their count.
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        LaurentTail { coeffs }
    }

    /// `z^{-k}` truncated at `order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        assert!(k >= 1, "tails carry no constant term");
        let mut t = Self::zero(order);
        if k <= order {
            t.coeffs[k - 1] = S::one();
        }
        t
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `z^{-k}`, `1 <= k <= order`.
    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k - 1]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(LaurentTail {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        LaurentTail {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    /// Truncated Cauchy product; coefficient `k` uses inputs `1..k-1` only.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.order();
        let mut out = Self::zero(n);
        for k in 2..=n {
            let mut acc = S::zero();
            for i in 1..k {
                acc = acc + self.coeffs[i - 1].clone() * other.coeffs[k - i - 1].clone();
            }
            out.coeffs[k - 1] = acc;
        }
        Ok(out)
    }

    /// `(1 + self)(1 + other) - 1`.
    pub fn unit_mul(&self, other: &Self) -> Result<Self> {
        self.add(other)?.add(&self.mul(other)?)
    }

    /// Tail `t` with `1/(1 - self) = 1 + t`.
    ///
    /// Solves `t = a + a·t` coefficientwise: `t_k = a_k + Σ_{i<k} a_i t_{k-i}`.
    pub fn inv_one_minus(&self) -> Self {
        let n = self.order();
        let mut t: Vec<S> = Vec::with_capacity(n);
        for k in 1..=n {
            let mut acc = self.coeffs[k - 1].clone();
            for i in 1..k {
                acc = acc + self.coeffs[i - 1].clone() * t[k - i - 1].clone();
            }
            t.push(acc);
        }
        LaurentTail { coeffs: t }
    }
}
