//! Bessel function of the first kind for real order and nonnegative argument.

use super::quadrature::adaptive_gauss_kronrod;
use super::{gamma_real, sin_pi, NumericError};
use crate::scalar::Scalar;

const SERIES_LIMIT: f64 = 12.0;

/// Argument beyond which the Hankel expansion is used for order `nu`.
pub fn asymptotic_threshold(nu: f64) -> f64 {
    30.0_f64.max(2.0 * nu * nu)
}

/// Hankel amplitudes `(P, Q)` with
/// `J_ν(z) = sqrt(2/(πz)) (P cos χ − Q sin χ)`, `χ = z − (ν/2 + 1/4)π`.
pub fn hankel_pq<T: Scalar>(nu: T, z: T) -> (T, T) {
    let mu = T::lit(4.0) * nu * nu;
    let eight_z = T::lit(8.0) * z;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..60 {
        let odd = T::lit((2 * k - 1) as f64);
        term = term * (mu - odd * odd) / (T::lit(k as f64) * eight_z);
        if term.abs() >= last && k > 2 {
            break;
        }
        last = term.abs();
        // a_k carries (-1)^{k/2} inside P for even k and (-1)^{(k-1)/2} in Q.
        match k % 4 {
            0 => p = p + term,
            1 => q = q + term,
            2 => p = p - term,
            _ => q = q - term,
        }
        if term.abs() < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    (p, q)
}

fn series<T: Scalar>(nu: T, z: T) -> Result<T, NumericError> {
    let quarter = -(z * z) / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..400 {
        let kf = T::lit(k as f64);
        term = term * quarter / (kf * (nu + kf));
        sum = sum + term;
        if term.abs() < T::epsilon() * sum.abs() * T::lit(1e-2) && k > 2 {
            break;
        }
    }
    Ok((z / T::lit(2.0)).powf(nu) / gamma_real(nu + T::one())? * sum)
}

fn integral<T: Scalar>(nu: T, z: T) -> Result<T, NumericError> {
    let tol = T::epsilon() * T::lit(64.0);
    let (first, _) = adaptive_gauss_kronrod(&mut |t: T| (nu * t - z * t.sin()).cos(), T::zero(), T::PI(), tol, tol)?;
    let mut value = first / T::PI();
    let s = sin_pi(nu);
    if s != T::zero() {
        let upper = (T::lit(40.0) / z).asinh();
        let (second, _) =
            adaptive_gauss_kronrod(&mut |t: T| (-z * t.sinh() - nu * t).exp(), T::zero(), upper, tol, tol)?;
        value = value - s / T::PI() * second;
    }
    Ok(value)
}

/// `J_ν(z)` for `z ≥ 0`. Negative integer orders use `J_{-n} = (-1)^n J_n`.
pub fn bessel_j<T: Scalar>(nu: T, z: T) -> Result<T, NumericError> {
    if z < T::zero() || z.is_nan() || nu.is_nan() {
        return Err(NumericError::NotANumber);
    }
    if nu < T::zero() && nu == nu.floor() {
        let n = -nu;
        let sign = if (n.to_f64().unwrap_or(0.0) as i64) % 2 == 0 { T::one() } else { -T::one() };
        return Ok(sign * bessel_j(n, z)?);
    }
    if z.is_zero() {
        return Ok(if nu.is_zero() {
            T::one()
        } else if nu > T::zero() {
            T::zero()
        } else {
            T::infinity()
        });
    }
    let nu64 = nu.to_f64().unwrap_or(f64::NAN);
    if z >= T::lit(asymptotic_threshold(nu64)) {
        let (p, q) = hankel_pq(nu, z);
        let chi = z - (nu / T::lit(2.0) + T::lit(0.25)) * T::PI();
        return Ok((T::lit(2.0) / (T::PI() * z)).sqrt() * (p * chi.cos() - q * chi.sin()));
    }
    if z <= T::lit(SERIES_LIMIT) || nu < T::zero() {
        return series(nu, z);
    }
    integral(nu, z)
}
