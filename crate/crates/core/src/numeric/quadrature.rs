//! Quadrature rules: adaptive Gauss–Kronrod on finite intervals, tanh-sinh for
//! endpoint singularities and exp-sinh for the half-line.

#![allow(clippy::excessive_precision)]

use super::NumericError;
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel; returns the estimate and |K15 − G7|.
pub fn gauss_kronrod<T: Scalar>(f: &mut dyn FnMut(T) -> T, a: T, b: T) -> (T, T) {
    let center = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod: bisects the panel with the largest error
/// estimate until the total estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gauss_kronrod<T: Scalar>(
    f: &mut dyn FnMut(T) -> T,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
) -> Result<(T, T), NumericError> {
    const MAX_PANELS: usize = 2000;
    let (v, e) = gauss_kronrod(f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: T = panels.iter().fold(T::zero(), |s, p| s + p.2);
        let err: T = panels.iter().fold(T::zero(), |s, p| s + p.3);
        if !total.is_finite() {
            return Err(NumericError::OracleFailedToConverge("non-finite integrand on a finite panel".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        if panels.len() >= MAX_PANELS {
            return Err(NumericError::OracleFailedToConverge(format!(
                "adaptive quadrature exhausted {MAX_PANELS} panels (error estimate {err:e})"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = (lo + hi) / T::lit(2.0);
        let (v1, e1) = gauss_kronrod(f, lo, mid);
        let (v2, e2) = gauss_kronrod(f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Level-refined double-exponential sum `h Σ g(kh)` over `|t| ≤ t_max`,
/// where `g` already contains the change of variables.
fn double_exponential<T: Scalar>(
    g: &mut dyn FnMut(T) -> Option<T>,
    t_min: T,
    t_max: T,
    tol: T,
) -> Result<T, NumericError> {
    let mut h = T::lit(0.5);
    let mut sum = T::zero();
    let mut prev: Option<T> = None;
    // First level: all points k·h; later levels add only the odd multiples.
    for level in 0..12 {
        let step = if level == 0 { h } else { h * T::lit(2.0) };
        let start = if level == 0 { T::zero() } else { h };
        let mut level_sum = T::zero();
        for direction in [T::one(), -T::one()] {
            let mut t = if direction > T::zero() { start } else { -start };
            if level == 0 && direction < T::zero() {
                t = -h;
            }
            loop {
                if t > t_max || t < t_min {
                    break;
                }
                match g(t) {
                    Some(v) if v.is_finite() => level_sum = level_sum + v,
                    _ => break,
                }
                t = t + direction * step;
            }
        }
        sum = sum + level_sum;
        let estimate = sum * h;
        if let Some(p) = prev {
            let diff = (estimate - p).abs();
            if level >= 3 && diff <= tol * estimate.abs().max(T::lit(1e-300)) {
                return Ok(estimate);
            }
            if level >= 3 && diff <= tol && estimate.abs() < T::one() {
                return Ok(estimate);
            }
        }
        prev = Some(estimate);
        h = h / T::lit(2.0);
    }
    Err(NumericError::OracleFailedToConverge("double-exponential quadrature did not settle".into()))
}

/// ∫ₐᵇ f by the tanh-sinh rule; tolerates integrable endpoint singularities.
pub fn tanh_sinh<T: Scalar>(f: &mut dyn FnMut(T) -> T, a: T, b: T, tol: T) -> Result<T, NumericError> {
    let half = (b - a) / T::lit(2.0);
    let pi_2 = T::FRAC_PI_2();
    let mut g = |t: T| {
        let u = pi_2 * t.sinh();
        // distance from the nearer endpoint, computed without cancellation
        let delta = half * T::lit(2.0) / (T::one() + (T::lit(2.0) * u.abs()).exp());
        let w = half * pi_2 * t.cosh() / u.cosh().powi(2);
        if delta <= T::zero() {
            return None;
        }
        let x = if u >= T::zero() { b - delta } else { a + delta };
        if x <= a || x >= b {
            return if w.is_zero() { None } else { Some(T::zero()) };
        }
        Some(w * f(x))
    };
    double_exponential(&mut g, T::lit(-6.5), T::lit(6.5), tol)
}

/// ∫ₐ^∞ f by the exp-sinh rule `x = a + exp(π/2 · sinh t)`.
pub fn exp_sinh<T: Scalar>(f: &mut dyn FnMut(T) -> T, a: T, tol: T) -> Result<T, NumericError> {
    let pi_2 = T::FRAC_PI_2();
    let mut g = |t: T| {
        let u = pi_2 * t.sinh();
        let e = u.exp();
        if !e.is_finite() {
            return None;
        }
        if e.is_zero() {
            return None;
        }
        let x = a + e;
        if x == a {
            return Some(T::zero());
        }
        let v = f(x) * e * pi_2 * t.cosh();
        Some(if v.is_finite() { v } else { T::nan() })
    };
    double_exponential(&mut g, T::lit(-7.0), T::lit(6.5), tol)
}
