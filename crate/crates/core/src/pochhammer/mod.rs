//! Pochhammer symbols: the classical rising factorial, its extension to
//! negative index, and the two competing values at a negative integer base.
//!
//! `(x)_{-m} = (-1)^m / (1-x)_m` is discontinuous at `x = -km`. Letting only
//! the base approach `-km` gives [`direct_poch_negative_integer`]; moving base
//! and index together, `(-k(m+ε))_{-(m+ε)}` with `ε → 0`, gives [`poch_e4`],
//! which is smaller by the factor `k/(k+1)`. Series evaluation must use the
//! latter; [`regularize`] implements it for arbitrary gamma products.

mod regularize;

use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{as_i64, factorial};

pub use regularize::{regularize, regularized_term_value, FactoredValue, PochMode, Regularized, TermValue};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum PochError {
    /// The base is `0, -1, -2, …`; route through regularization instead.
    #[error("negative integer base {0}: use the regularized evaluation")]
    NegativeIntegerBase(i64),
    /// `(1-a)_m` vanishes, so `Γ(a-m)` sits on a pole.
    #[error("(a)_{{-{m}}} is infinite for a = {a}")]
    Pole { a: i64, m: u64 },
}

/// Scalars on which Pochhammer symbols can be evaluated, floating or exact.
pub trait PochScalar: Clone + Num + Neg<Output = Self> {
    /// `Some(n)` when the value is exactly the integer `n`.
    fn integer_value(&self) -> Option<i64>;
}

impl PochScalar for f64 {
    fn integer_value(&self) -> Option<i64> {
        (self.fract() == 0.0 && self.abs() < 9.0e15).then_some(*self as i64)
    }
}

impl PochScalar for f32 {
    fn integer_value(&self) -> Option<i64> {
        (self.fract() == 0.0 && self.abs() < 1.6e7).then_some(*self as i64)
    }
}

impl PochScalar for BigRational {
    fn integer_value(&self) -> Option<i64> {
        as_i64(self)
    }
}

/// Rising factorial `a(a+1)⋯(a+k-1)`; `(a)_0 = 1`.
pub fn pochhammer<T>(a: T, k: u32) -> T
where
    T: Clone + One + Add<Output = T> + Mul<Output = T>,
{
    let mut acc = T::one();
    let mut term = a;
    for _ in 0..k {
        acc = acc * term.clone();
        term = term + T::one();
    }
    acc
}

/// `(a)_{-m} = (-1)^m / (1-a)_m`, equal to `Γ(a-m)/Γ(a)` where both sides are
/// defined.
pub fn poch_negative<T: PochScalar>(a: T, m: u32) -> Result<T, PochError> {
    if let Some(n) = a.integer_value() {
        if n <= 0 {
            return Err(PochError::NegativeIntegerBase(n));
        }
        if n <= i64::from(m) {
            return Err(PochError::Pole { a: n, m: u64::from(m) });
        }
    }
    let denom = pochhammer(T::one() - a, m);
    let sign = if m.is_multiple_of(2) { T::one() } else { -T::one() };
    Ok(sign / denom)
}

fn signed_factorial_ratio(k: u64, m: u64) -> BigRational {
    let ratio = BigRational::new(factorial(k * m), factorial((k + 1) * m));
    if m.is_multiple_of(2) {
        ratio
    } else {
        -ratio
    }
}

/// The limiting value `(-km)_{-m} = k/(k+1) · (-1)^m (km)! / ((k+1)m)!`,
/// obtained by perturbing base and index together. At `m = 0` it is
/// `k/(k+1)`, not 1.
pub fn poch_e4(k: u64, m: u64) -> BigRational {
    assert!(k >= 1, "k must be positive");
    signed_factorial_ratio(k, m) * BigRational::new(BigInt::from(k), BigInt::from(k + 1))
}

/// The base-only limit `(-km)_{-m} = (-1)^m (km)! / ((k+1)m)!` of the
/// classical negative-index rule. Kept for reproducing legacy results.
pub fn direct_poch_negative_integer(k: u64, m: u64) -> BigRational {
    assert!(k >= 1 && m >= 1, "k and m must be positive");
    signed_factorial_ratio(k, m)
}

/// Float convenience for [`poch_e4`].
pub fn poch_e4_f64(k: u64, m: u64) -> f64 {
    crate::scalar::rational_to_scalar(&poch_e4(k, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn rising_factorial() {
        assert_eq!(pochhammer(2.5_f64, 0), 1.0);
        assert_eq!(pochhammer(rat(1, 2), 2), rat(3, 4));
        assert_eq!(pochhammer(3.0_f64, 4), 360.0);
        assert_eq!(pochhammer(int(3), 4), int(360));
    }

    #[test]
    fn negative_index() {
        assert_eq!(poch_negative(rat(1, 2), 1).unwrap(), int(-2));
        assert_eq!(poch_negative(int(3), 1).unwrap(), rat(1, 2));
        assert!((poch_negative(0.5_f64, 1).unwrap() + 2.0).abs() < 1e-15);
        assert_eq!(poch_negative(int(-2), 1), Err(PochError::NegativeIntegerBase(-2)));
        assert_eq!(poch_negative(0.0_f64, 3), Err(PochError::NegativeIntegerBase(0)));
        assert_eq!(poch_negative(int(2), 3), Err(PochError::Pole { a: 2, m: 3 }));
    }

    #[test]
    fn negative_index_matches_gamma_quotient() {
        use crate::numeric::gamma_real;
        for &a in &[0.3_f64, 2.7, -1.5, 7.25] {
            for m in 1..6 {
                let expected = gamma_real(a - f64::from(m)).unwrap() / gamma_real(a).unwrap();
                let got = poch_negative(a, m).unwrap();
                assert!((got - expected).abs() <= 1e-12 * expected.abs(), "a={a} m={m}");
            }
        }
    }

    #[test]
    fn e4_values() {
        assert_eq!(poch_e4(1, 1), rat(-1, 4));
        assert_eq!(poch_e4(2, 1), rat(-2, 9));
        assert_eq!(poch_e4(1, 0), rat(1, 2));
        assert_eq!(poch_e4(3, 0), rat(3, 4));
    }

    #[test]
    fn direct_values_and_ratio() {
        assert_eq!(direct_poch_negative_integer(1, 1), rat(-1, 2));
        assert_eq!(direct_poch_negative_integer(1, 2), rat(1, 12));
        for k in 1..=4u64 {
            for m in 1..=20u64 {
                let ratio = direct_poch_negative_integer(k, m) / poch_e4(k, m);
                assert_eq!(ratio, BigRational::new(BigInt::from(k + 1), BigInt::from(k)));
            }
        }
    }

    #[test]
    fn perturbed_gamma_quotient_approaches_e4_linearly() {
        use crate::numeric::gamma_real;
        for k in 1..=4u64 {
            for m in 0..=20u64 {
                let target = poch_e4_f64(k, m);
                let errs: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6]
                    .iter()
                    .map(|&eps| {
                        let x = m as f64 + eps;
                        let v = gamma_real(-((k + 1) as f64) * x).unwrap() / gamma_real(-(k as f64) * x).unwrap();
                        ((v - target) / target).abs() / eps
                    })
                    .collect();
                let (lo, hi) = errs.iter().fold((f64::MAX, 0.0_f64), |(l, h), &e| (l.min(e), h.max(e)));
                assert!(hi <= 10.0 * lo.max(1e-3), "k={k} m={m}: {errs:?}");
                assert!(errs[3] <= 10.0, "k={k} m={m}: {errs:?}");
            }
        }
    }
}
