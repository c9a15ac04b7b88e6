//! Real gamma function.

#![allow(clippy::excessive_precision)]

use super::NumericError;
use crate::scalar::Scalar;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(πx)` with the argument reduced exactly before scaling by π, so the
/// result keeps full relative accuracy near the integers.
pub fn sin_pi<T: Scalar>(x: T) -> T {
    let two = T::lit(2.0);
    let mut r = x - two * (x / two).round();
    let mut sign = T::one();
    if r < T::zero() {
        r = -r;
        sign = -sign;
    }
    if r > T::lit(0.5) {
        r = T::one() - r;
    }
    sign * (T::PI() * r).sin()
}

fn lanczos<T: Scalar>(x: T) -> T {
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(*c) / (z + T::from_usize_lossy(i));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half = (z + T::lit(0.5)) / T::lit(2.0);
    // t^(z+1/2) split in two halves to delay overflow.
    let p = t.powf(half);
    (T::TAU()).sqrt() * p * (p * (-t).exp()) * acc
}

/// Γ(x) for real `x`, using the Lanczos approximation for `x ≥ 1/2` and the
/// reflection formula below.
pub fn gamma_real<T: Scalar>(x: T) -> Result<T, NumericError> {
    if x.is_nan() {
        return Err(NumericError::NotANumber);
    }
    if x <= T::zero() && x == x.floor() {
        return Err(NumericError::PoleAt(x.to_f64().unwrap_or(f64::NAN)));
    }
    if x < T::lit(0.5) {
        let s = sin_pi(x);
        Ok(T::PI() / (s * lanczos(T::one() - x)))
    } else {
        Ok(lanczos(x))
    }
}
