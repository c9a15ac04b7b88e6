//! Floating-point scalar abstraction used by the numeric kernels.

use std::fmt::{Debug, Display, LowerExp};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Signed, ToPrimitive, Zero};

/// Floating point: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an exact rational to the nearest representable float, saturating to
/// ±inf or 0 when outside range.
pub fn rational_to_scalar<T: Scalar>(q: &BigRational) -> T {
    if q.is_zero() {
        return T::zero();
    }
    if let Some(v) = q.to_f64() {
        if v.is_finite() && v != 0.0 {
            return T::lit(v);
        }
    }
    let ln = ln_abs_rational(q);
    let mag = T::lit(ln).exp();
    if q.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Natural logarithm of |q| computed from the bit lengths, valid far outside the
/// `f64` range.
pub fn ln_abs_rational(q: &BigRational) -> f64 {
    ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom())
}

pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(|v| v.abs().ln()).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn huge_rationals_saturate_through_logs() {
        let big = BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone() * 3, big);
        assert_eq!(rational_to_scalar::<f64>(&q), 3.0);
        let q = BigRational::new(BigInt::from(10).pow(320), BigInt::from(10).pow(10));
        let v: f64 = rational_to_scalar(&q);
        assert!(v.is_infinite());
        let ln = ln_abs_rational(&q);
        assert!((ln - 310.0 * std::f64::consts::LN_10).abs() < 1e-9);
    }
}
