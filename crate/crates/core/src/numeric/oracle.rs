//! Independent quadrature estimate of `∫₀^∞ f(x) dx` for catalog integrands.
//!
//! Monotone integrands are split at 1 into a tanh-sinh and an exp-sinh piece.
//! Oscillatory integrands are integrated directly on `[0, X₀]`; beyond `X₀`
//! every oscillating factor is written as `Re[U(x) e^{iωx}]` with a slowly
//! varying amplitude `U` (Hankel form for Bessel J), the product is expanded
//! into single-frequency components, and each component is summed over
//! half-periods with iterated averaging of the partial sums.

use num_complex::Complex;
use serde::Serialize;

use super::bessel::{asymptotic_threshold, bessel_j, hankel_pq};
use super::quadrature::{adaptive_gauss_kronrod, exp_sinh, gauss_kronrod, tanh_sinh};
use super::NumericError;
use crate::expr::{Atom, Coeff, Integrand};
use crate::scalar::{rational_to_scalar, Scalar};
use crate::types::{AffineForm, Bindings, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate<T> {
    pub value: T,
    pub error_estimate: T,
}

fn coeff_value<T: Scalar>(c: &Coeff, b: &Bindings) -> Result<T, NumericError> {
    let mut v: T = rational_to_scalar(&c.rational);
    for (p, k) in &c.params {
        v = v * T::lit(b.param(p)?).powi(*k);
    }
    Ok(v)
}

fn form_value<T: Scalar>(f: &AffineForm, b: &Bindings) -> Result<T, NumericError> {
    Ok(rational_to_scalar(&f.eval_exact(&Point::new(), b)?))
}

/// Atom with its bindings resolved to numbers.
#[derive(Debug, Clone)]
enum Factor<T> {
    Power(T),
    Exp { c: T, p: T },
    Sin(T),
    Cos(T),
    Bessel { nu: T, a: T },
    Multinomial { terms: Vec<(T, T)>, e: T },
    Constant(T),
}

impl<T: Scalar> Factor<T> {
    fn resolve(atom: &Atom, b: &Bindings) -> Result<Self, NumericError> {
        Ok(match atom {
            Atom::Power(e) => Factor::Power(form_value(e, b)?),
            Atom::Exp { coeff, power } => Factor::Exp { c: coeff_value(coeff, b)?, p: rational_to_scalar(power) },
            Atom::Sin(c) => Factor::Sin(coeff_value(c, b)?),
            Atom::Cos(c) => Factor::Cos(coeff_value(c, b)?),
            Atom::BesselJ { order, coeff } => Factor::Bessel { nu: form_value(order, b)?, a: coeff_value(coeff, b)? },
            Atom::Multinomial { terms, exponent } => Factor::Multinomial {
                terms: terms
                    .iter()
                    .map(|m| Ok((coeff_value(&m.coeff, b)?, rational_to_scalar(&m.power))))
                    .collect::<Result<_, NumericError>>()?,
                e: form_value(exponent, b)?,
            },
            Atom::Scalar(c) => Factor::Constant(coeff_value(c, b)?),
        })
    }

    fn value(&self, x: T) -> Result<T, NumericError> {
        Ok(match self {
            Factor::Power(e) => x.powf(*e),
            Factor::Exp { c, p } => (-*c * x.powf(*p)).exp(),
            Factor::Sin(w) => (*w * x).sin(),
            Factor::Cos(w) => (*w * x).cos(),
            Factor::Bessel { nu, a } => bessel_j(*nu, *a * x)?,
            Factor::Multinomial { terms, e } => terms.iter().fold(T::zero(), |s, (c, p)| s + *c * x.powf(*p)).powf(*e),
            Factor::Constant(c) => *c,
        })
    }

    fn frequency(&self) -> Option<T> {
        match self {
            Factor::Sin(w) | Factor::Cos(w) | Factor::Bessel { a: w, .. } if *w > T::zero() => Some(*w),
            _ => None,
        }
    }

    /// `U(x)` with `factor = Re[U(x) e^{iωx}]`, for oscillating factors.
    fn amplitude(&self, x: T) -> Complex<T> {
        match self {
            Factor::Sin(_) => Complex::new(T::zero(), -T::one()),
            Factor::Cos(_) => Complex::new(T::one(), T::zero()),
            Factor::Bessel { nu, a } => {
                let z = *a * x;
                let (p, q) = hankel_pq(*nu, z);
                let phase = -(*nu / T::lit(2.0) + T::lit(0.25)) * T::PI();
                let scale = (T::lit(2.0) / (T::PI() * z)).sqrt();
                Complex::new(p, q) * Complex::from_polar(scale, phase)
            }
            _ => Complex::new(T::one(), T::zero()),
        }
    }
}

fn resolve_all<T: Scalar>(integrand: &Integrand, b: &Bindings) -> Result<Vec<Factor<T>>, NumericError> {
    integrand.factors.iter().map(|a| Factor::resolve(a, b)).collect()
}

fn product<T: Scalar>(factors: &[Factor<T>], x: T) -> Result<T, NumericError> {
    factors.iter().try_fold(T::one(), |acc, f| Ok(acc * f.value(x)?))
}

/// Pointwise value of a product-form integrand.
pub fn integrand_value<T: Scalar>(integrand: &Integrand, x: T, b: &Bindings) -> Result<T, NumericError> {
    product(&resolve_all::<T>(integrand, b)?, x)
}

/// Runs `f` and converts the first numeric error raised inside a quadrature
/// callback into a result.
fn guarded<T: Scalar>(
    factors: &[Factor<T>],
    run: impl FnOnce(&mut dyn FnMut(T) -> T) -> Result<T, NumericError>,
) -> Result<T, NumericError> {
    let mut failure = None;
    let mut f = |x: T| match product(factors, x) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            T::zero()
        }
    };
    let v = run(&mut f);
    if let Some(e) = failure {
        return Err(e);
    }
    v
}

fn decays(inner: f64, outer: f64) -> bool {
    outer == 0.0 || outer < 0.5 * inner
}

/// Rejects `f` unless `x·|f(x)|` decays as `x → ∞`.
fn check_at_infinity<T: Scalar>(f: &mut dyn FnMut(T) -> T, from: T) -> Result<(), NumericError> {
    let base = from.max(T::one());
    let [inner, outer] = [1e4, 1e10].map(|s| {
        let x = base * T::lit(s);
        (x * f(x)).abs().to_f64().unwrap_or(f64::NAN)
    });
    if decays(inner, outer) {
        Ok(())
    } else {
        Err(NumericError::OracleFailedToConverge("integrand does not decay fast enough at infinity".into()))
    }
}

/// Rejects `f` unless `x·|f(x)|` decays as `x → 0⁺`.
fn check_at_zero<T: Scalar>(f: &mut dyn FnMut(T) -> T) -> Result<(), NumericError> {
    let [inner, outer] = [1e-4, 1e-10].map(|s| {
        let x = T::lit(s);
        (x * f(x)).abs().to_f64().unwrap_or(f64::NAN)
    });
    if decays(inner, outer) {
        Ok(())
    } else {
        Err(NumericError::OracleFailedToConverge("integrand is not integrable at 0".into()))
    }
}

fn monotone<T: Scalar>(factors: &[Factor<T>], tol: T) -> Result<OracleEstimate<T>, NumericError> {
    let value = guarded(factors, |f| {
        check_at_zero(f)?;
        check_at_infinity(f, T::one())?;
        let head = tanh_sinh(f, T::zero(), T::one(), tol)?;
        let tail = exp_sinh(f, T::one(), tol)?;
        Ok(head + tail)
    })?;
    Ok(OracleEstimate { value, error_estimate: tol * value.abs().max(T::one()) })
}

/// Amplitude function and frequency of one single-frequency tail component.
struct Component {
    /// Indices into the oscillating factors, and whether each is conjugated.
    signs: Vec<bool>,
}

fn components(n: usize) -> Vec<Component> {
    // Re[A₁]⋯Re[A_n] = 2^{1-n} Σ Re[A₁ ∏_{k>1} A_k^{±}], conjugation on each later factor.
    (0..1usize << n.saturating_sub(1))
        .map(|mask| Component { signs: (0..n).map(|k| k > 0 && mask & (1 << (k - 1)) != 0).collect() })
        .collect()
}

fn iterated_average<T: Scalar>(partials: &[T]) -> (T, T) {
    let mut row = partials.to_vec();
    let mut last_delta = T::infinity();
    while row.len() > 1 {
        row = row.windows(2).map(|w| (w[0] + w[1]) / T::lit(2.0)).collect();
        if row.len() >= 2 {
            last_delta = (row[row.len() - 1] - row[row.len() - 2]).abs();
        }
    }
    (row[0], last_delta)
}

const TAIL_HALF_PERIODS: usize = 48;

fn oscillatory<T: Scalar>(factors: &[Factor<T>], tol: T) -> Result<OracleEstimate<T>, NumericError> {
    let freqs: Vec<T> = factors.iter().filter_map(Factor::frequency).collect();
    let w_max = freqs.iter().copied().fold(T::zero(), T::max);
    let mut x0 = T::lit(8.0);
    for f in factors {
        if let Factor::Bessel { nu, a } = f {
            let z = T::lit(asymptotic_threshold(nu.to_f64().unwrap_or(0.0)));
            x0 = x0.max(z / *a);
        }
    }
    let half = T::PI() / w_max;
    // Head: one tanh-sinh panel for endpoint behaviour, then half-periods.
    let head_tol = tol * T::lit(1e-3);
    let first = half.min(x0);
    let mut head = guarded(factors, |f| {
        check_at_zero(f)?;
        tanh_sinh(f, T::zero(), first, head_tol)
    })?;
    let mut lo = first;
    while lo < x0 {
        let hi = (lo + half).min(x0);
        head = head
            + guarded(factors, |f| {
                adaptive_gauss_kronrod(f, lo, hi, head_tol, T::epsilon() * T::lit(16.0)).map(|r| r.0)
            })?;
        lo = hi;
    }

    let osc: Vec<&Factor<T>> = factors.iter().filter(|f| f.frequency().is_some()).collect();
    let smooth: Vec<&Factor<T>> = factors.iter().filter(|f| f.frequency().is_none()).collect();
    let scale = T::lit(2.0).powi(1 - osc.len() as i32);
    let mut tail = T::zero();
    let mut tail_err = T::zero();
    for comp in components(osc.len()) {
        let omega = osc.iter().zip(&comp.signs).fold(T::zero(), |s, (f, &conj)| {
            let w = f.frequency().unwrap_or_else(T::zero);
            if conj {
                s - w
            } else {
                s + w
            }
        });
        let mut failure = None;
        let mut amp = |x: T| -> Complex<T> {
            let mut u = Complex::new(scale, T::zero());
            for (f, &conj) in osc.iter().zip(&comp.signs) {
                let a = f.amplitude(x);
                u = u * if conj { a.conj() } else { a };
            }
            let mut s = T::one();
            for f in &smooth {
                match f.value(x) {
                    Ok(v) => s = s * v,
                    Err(e) => {
                        failure.get_or_insert(e);
                    }
                }
            }
            if omega < T::zero() {
                u.conj() * s
            } else {
                u * s
            }
        };
        let w = omega.abs();
        let (v, e) = if w <= T::epsilon() * w_max * T::lit(1e3) {
            let mut g = |x: T| amp(x).re;
            check_at_infinity(&mut g, x0)?;
            (exp_sinh(&mut g, x0, tol * T::lit(1e-3))?, T::zero())
        } else {
            let step = T::PI() / w;
            let mut partials = Vec::with_capacity(TAIL_HALF_PERIODS);
            let mut acc = T::zero();
            for k in 0..TAIL_HALF_PERIODS {
                let a = x0 + step * T::lit(k as f64);
                let mut g = |x: T| (amp(x) * Complex::from_polar(T::one(), w * x)).re;
                let (piece, _) = gauss_kronrod(&mut g, a, a + step);
                acc = acc + piece;
                partials.push(acc);
            }
            iterated_average(&partials)
        };
        if let Some(e) = failure {
            return Err(e);
        }
        tail = tail + v;
        tail_err = tail_err + e;
    }
    let value = head + tail;
    if !value.is_finite() {
        return Err(NumericError::OracleFailedToConverge("non-finite estimate".into()));
    }
    if tail_err > tol {
        return Err(NumericError::OracleFailedToConverge(format!(
            "tail acceleration stalled (estimate {:e})",
            tail_err.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(OracleEstimate { value, error_estimate: tail_err + head_tol })
}

/// Estimates `Σ_i ∫₀^∞ integrand_i(x) dx` to absolute accuracy about `tol`.
pub fn quadrature_oracle<T: Scalar>(
    integrands: &[Integrand],
    bindings: &Bindings,
    tol: T,
) -> Result<OracleEstimate<T>, NumericError> {
    let mut total = OracleEstimate { value: T::zero(), error_estimate: T::zero() };
    for integrand in integrands {
        let factors = resolve_all::<T>(integrand, bindings)?;
        let est = if factors.iter().any(|f| f.frequency().is_some()) {
            oscillatory(&factors, tol)?
        } else {
            monotone(&factors, tol)?
        };
        total.value = total.value + est.value;
        total.error_estimate = total.error_estimate + est.error_estimate;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_integrands;

    fn oracle(text: &str, b: &Bindings, tol: f64) -> Result<f64, NumericError> {
        quadrature_oracle(&parse_integrands(text).unwrap(), b, tol).map(|e| e.value)
    }

    #[test]
    fn monotone_corpus() {
        let b = Bindings::new();
        assert!((oracle("exp(-x)", &b, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let half_sqrt_pi = std::f64::consts::PI.sqrt() / 2.0;
        assert!((oracle("exp(-x^2)", &b, 1e-12).unwrap() - half_sqrt_pi).abs() < 1e-12);
        let v = oracle("x^(-1/2)*(1+x)^(-1)", &b, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn bessel_sine_product() {
        for (a, bb) in [(1.0, 2.0), (0.5, 1.3), (3.0, 3.5)] {
            let b = Bindings::new().with_param("a", a).with_param("b", bb);
            let v = oracle("besselj(0,a*x)*sin(b*x)", &b, 1e-8).unwrap();
            let want = 1.0 / (bb * bb - a * a).sqrt();
            assert!((v - want).abs() < 1e-7, "({a},{bb}): {v} vs {want}");
        }
        // Region b < a, where the integral vanishes.
        let b = Bindings::new().with_param("a", 2.0).with_param("b", 1.0);
        let v = oracle("besselj(0,a*x)*sin(b*x)", &b, 1e-8).unwrap();
        assert!(v.abs() < 1e-7, "{v}");
    }

    #[test]
    fn plain_sine_integrals() {
        let b = Bindings::new();
        // ∫ sin(x) e^{-x} = 1/2
        assert!((oracle("sin(x)*exp(-x)", &b, 1e-10).unwrap() - 0.5).abs() < 1e-10);
        // ∫ x^{-1/2} sin x = √(π/2)
        let v = oracle("x^(-1/2)*sin(x)", &b, 1e-8).unwrap();
        assert!((v - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-7, "{v}");
    }

    #[test]
    fn non_integrable_tail_is_reported() {
        let b = Bindings::new().with_param("a", 1.0).with_param("b", 1.0);
        assert!(matches!(oracle("besselj(0,a*x)*sin(b*x)", &b, 1e-8), Err(NumericError::OracleFailedToConverge(_))));
        assert!(oracle("x^(-1)*exp(-x)", &Bindings::new(), 1e-8).is_err());
    }
}
