//! ε-regularized evaluation of gamma products at lattice points.
//!
//! Every free index `nⱼ` is shifted to `nⱼ + ε` with one shared `ε`. A factor
//! `Γ(L)` whose argument lands on `-p` then behaves like
//! `(-1)^p / (p! · α ε)` with `α = Σ ∂L/∂nⱼ`, and the value at the point is the
//! `ε → 0` limit of the whole product. Poles are counted with their exponent:
//! a surplus in the numerator diverges, a surplus in the denominator vanishes,
//! and a balanced product keeps the ratio of residues.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exact::{as_i64, factorial, half_integer_floor, product_range};
use crate::numeric::gamma_real;
use crate::scalar::{ln_abs_rational, rational_to_scalar, Scalar};
use crate::types::{BindingError, Bindings, GammaProduct, Point};

/// How gamma poles at negative integers are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PochMode {
    /// Shift the summation indices: reproduces the limiting Pochhammer value.
    #[default]
    Regularized,
    /// Shift only the base of each singular factor: reproduces the classical
    /// `(x)_{-m} = (-1)^m/(1-x)_m` rule taken to the limit, i.e. the direct
    /// value. Kept for regression against historical results.
    Legacy,
}

/// Value of a series term at a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TermValue<T> {
    Finite(T),
    /// Structural zero from an unbalanced reciprocal pole.
    Zero,
    Divergent,
}

impl<T: Scalar> TermValue<T> {
    /// Numeric value; `Zero` maps to 0 and `Divergent` to `None`.
    pub fn to_real(self) -> Option<T> {
        match self {
            TermValue::Finite(v) => Some(v),
            TermValue::Zero => Some(T::zero()),
            TermValue::Divergent => None,
        }
    }
}

/// A finite regularized value kept as `rational · (√π)^k · float`, where the
/// float part collects everything that cannot be exact (parameter powers,
/// gamma at generic rationals).
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredValue<T> {
    rational: BigRational,
    sqrt_pi_power: i64,
    float_factor: T,
    float_used: bool,
    /// Natural log of factorial quotients too large to form exactly.
    ln_scale: f64,
}

impl<T: Scalar> FactoredValue<T> {
    pub fn rational(&self) -> &BigRational {
        &self.rational
    }

    pub fn sqrt_pi_power(&self) -> i64 {
        self.sqrt_pi_power
    }

    pub fn float_factor(&self) -> T {
        self.float_factor
    }

    /// The exact value when no irrational factor entered.
    pub fn exact(&self) -> Option<&BigRational> {
        (self.sqrt_pi_power == 0 && !self.float_used).then_some(&self.rational)
    }

    pub fn value(&self) -> T {
        if self.rational.is_zero() || self.float_factor.is_zero() {
            return T::zero();
        }
        let sqrt_pi = T::PI().sqrt();
        if self.ln_scale == 0.0 {
            let direct =
                rational_to_scalar::<T>(&self.rational) * sqrt_pi.powi(self.sqrt_pi_power as i32) * self.float_factor;
            if direct.is_finite() && direct.is_normal() {
                return direct;
            }
        }
        let ln = T::lit(ln_abs_rational(&self.rational) + self.ln_scale)
            + T::lit(self.sqrt_pi_power as f64) * sqrt_pi.ln()
            + self.float_factor.abs().ln();
        let negative = self.rational.is_negative() != (self.float_factor < T::zero());
        let mag = ln.exp();
        if negative {
            -mag
        } else {
            mag
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regularized<T> {
    Zero,
    Divergent,
    Finite(FactoredValue<T>),
}

impl<T: Scalar> Regularized<T> {
    pub fn term_value(&self) -> TermValue<T> {
        match self {
            Regularized::Zero => TermValue::Zero,
            Regularized::Divergent => TermValue::Divergent,
            Regularized::Finite(v) => TermValue::Finite(v.value()),
        }
    }

    pub fn exact(&self) -> Option<BigRational> {
        match self {
            Regularized::Zero => Some(BigRational::zero()),
            Regularized::Finite(v) => v.exact().cloned(),
            Regularized::Divergent => None,
        }
    }
}

/// Factorial multiplications allowed per term before quotients are taken in
/// log space instead.
const EXACT_FACTORIAL_WORK: u64 = 512;
/// Bit size beyond which rational powers are taken in log space.
const EXACT_POWER_BITS: u64 = 4096;

/// `ln n!`, by Stirling's series beyond the point where it is exact to `f64`.
fn ln_factorial(n: u64) -> f64 {
    if n < 64 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64;
    let x2 = x * x;
    x * x.ln() - x
        + 0.5 * (std::f64::consts::TAU * x).ln()
        + (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * x2)) / x2) / x
}

/// Accumulates an exact product while deferring factorials so that large
/// quotients like `(2m)!/m!` are formed by cancellation.
struct ExactAcc {
    numer: BigInt,
    denom: BigInt,
    fact_up: Vec<u64>,
    fact_down: Vec<u64>,
    ln_extra: f64,
    approximate: bool,
}

impl ExactAcc {
    fn new(q: &BigRational) -> Self {
        Self {
            numer: q.numer().clone(),
            denom: q.denom().clone(),
            fact_up: Vec::new(),
            fact_down: Vec::new(),
            ln_extra: 0.0,
            approximate: false,
        }
    }

    fn mul_int(&mut self, n: BigInt, power: i32) {
        let p = n.pow(power.unsigned_abs());
        if power > 0 {
            self.numer *= p;
        } else {
            self.denom *= p;
        }
    }

    fn mul_rational(&mut self, q: &BigRational, power: i32) {
        let bits = (q.numer().bits() + q.denom().bits()) * u64::from(power.unsigned_abs());
        if bits > EXACT_POWER_BITS {
            self.approximate = true;
            self.ln_extra += f64::from(power) * ln_abs_rational(q);
            if q.is_negative() && power % 2 != 0 {
                self.negate();
            }
            return;
        }
        self.mul_int(q.numer().clone(), power);
        self.mul_int(q.denom().clone(), -power);
    }

    fn factorial(&mut self, n: u64, power: i32) {
        let slot = if power > 0 { &mut self.fact_up } else { &mut self.fact_down };
        slot.extend(std::iter::repeat_n(n, power.unsigned_abs() as usize));
    }

    fn negate(&mut self) {
        self.numer = -std::mem::take(&mut self.numer);
    }

    /// Returns `(q, ln_scale)` with the product equal to `q · exp(ln_scale)`;
    /// `ln_scale` is `None` when the product was formed exactly.
    fn finish(mut self) -> (BigRational, Option<f64>) {
        self.fact_up.sort_unstable_by(|a, b| b.cmp(a));
        self.fact_down.sort_unstable_by(|a, b| b.cmp(a));
        let pairs = self.fact_up.len().min(self.fact_down.len());
        let work: u64 = self.fact_up.iter().zip(&self.fact_down).map(|(u, d)| u.abs_diff(*d)).sum::<u64>()
            + self.fact_up[pairs..].iter().chain(&self.fact_down[pairs..]).sum::<u64>();
        if work > EXACT_FACTORIAL_WORK {
            let ln = self.fact_up.iter().map(|&u| ln_factorial(u)).sum::<f64>()
                - self.fact_down.iter().map(|&d| ln_factorial(d)).sum::<f64>();
            return (BigRational::new(self.numer, self.denom), Some(ln + self.ln_extra));
        }
        for i in 0..pairs {
            let (u, d) = (self.fact_up[i], self.fact_down[i]);
            if u >= d {
                self.numer *= product_range(d + 1, u);
            } else {
                self.denom *= product_range(u + 1, d);
            }
        }
        for &u in &self.fact_up[pairs..] {
            self.numer *= factorial(u);
        }
        for &d in &self.fact_down[pairs..] {
            self.denom *= factorial(d);
        }
        let q = BigRational::new(self.numer, self.denom);
        (q, self.approximate.then_some(self.ln_extra))
    }
}

/// Evaluates `term` at `point` as the shared-ε limit described in the module
/// documentation, keeping exact parts exact.
pub fn regularize<T: Scalar>(
    term: &GammaProduct,
    point: &Point,
    bindings: &Bindings,
    mode: PochMode,
) -> Result<Regularized<T>, BindingError> {
    for v in term.indices() {
        if !point.contains_key(&v) {
            return Err(BindingError::UnassignedIndex(v));
        }
    }
    let mut acc = ExactAcc::new(term.prefactor());
    let mut sqrt_pi_power = 0i64;
    let mut float = T::one();
    let mut float_used = false;
    let mut pole_balance = 0i64;
    let mut hard_zero = false;
    let mut hard_pole = false;

    for (arg, sigma) in term.gamma_factors() {
        let v = arg.eval_exact(point, bindings)?;
        if let Some(n) = as_i64(&v) {
            if n >= 1 {
                acc.factorial((n - 1) as u64, sigma);
                continue;
            }
            let p = n.unsigned_abs();
            let slope = arg.slope();
            if slope.is_zero() {
                if sigma < 0 {
                    hard_zero = true;
                } else {
                    hard_pole = true;
                }
                continue;
            }
            let slope = match mode {
                PochMode::Regularized => slope,
                PochMode::Legacy => BigRational::one(),
            };
            // Γ(-p + αε) ~ (-1)^p / (p! α ε)
            if p % 2 == 1 && sigma % 2 != 0 {
                acc.negate();
            }
            acc.factorial(p, -sigma);
            acc.mul_rational(&slope, -sigma);
            pole_balance += i64::from(sigma);
        } else if let Some(n) = half_integer_floor(&v) {
            // Γ(n + 1/2) = (2n)! / (4^n n!) √π,  Γ(1/2 - n) = (-4)^n n! / (2n)! √π
            if n >= 0 {
                let n = n as u64;
                acc.factorial(2 * n, sigma);
                acc.factorial(n, -sigma);
                acc.mul_rational(&BigRational::from_integer(BigInt::from(4)), -sigma * n as i32);
            } else {
                let n = n.unsigned_abs();
                acc.factorial(n, sigma);
                acc.factorial(2 * n, -sigma);
                acc.mul_rational(&BigRational::from_integer(BigInt::from(4)), sigma * n as i32);
                if n % 2 == 1 && sigma % 2 != 0 {
                    acc.negate();
                }
            }
            sqrt_pi_power += i64::from(sigma);
        } else {
            let x = T::lit(v.to_f64().unwrap_or(f64::NAN));
            let g = gamma_real(x).expect("non-integer argument is regular");
            float = float * g.powi(sigma);
            float_used = true;
        }
    }

    if hard_pole {
        return Ok(Regularized::Divergent);
    }
    if hard_zero {
        return Ok(Regularized::Zero);
    }
    if pole_balance > 0 {
        return Ok(Regularized::Divergent);
    }
    if pole_balance < 0 {
        return Ok(Regularized::Zero);
    }

    for v in term.indicators() {
        let n = point[v];
        if n % 2 == 1 {
            acc.negate();
        }
        acc.factorial(n, -1);
    }

    for (base, exponent) in term.numeric_powers() {
        let e = exponent.eval_exact(point, bindings)?;
        match as_i64(&e).and_then(|k| i32::try_from(k).ok()) {
            Some(k) => acc.mul_rational(base, k),
            None => {
                let b = T::lit(base.to_f64().unwrap_or(f64::NAN));
                float = float * b.powf(T::lit(e.to_f64().unwrap_or(f64::NAN)));
                float_used = true;
            }
        }
    }

    for (param, exponent) in term.param_powers() {
        let value = bindings.param(param)?;
        let e = exponent.eval_exact(point, bindings)?;
        float_used = true;
        if value == 0.0 {
            if e.is_zero() {
                continue;
            }
            if e.is_negative() {
                return Ok(Regularized::Divergent);
            }
            float = T::zero();
            continue;
        }
        let x = T::lit(value);
        float = float
            * match as_i64(&e).and_then(|k| i32::try_from(k).ok()) {
                Some(k) => x.powi(k),
                None => x.powf(T::lit(e.to_f64().unwrap_or(f64::NAN))),
            };
    }

    let (rational, ln_scale) = acc.finish();
    let float_used = float_used || ln_scale.is_some();
    Ok(Regularized::Finite(FactoredValue {
        rational,
        sqrt_pi_power,
        float_factor: float,
        float_used,
        ln_scale: ln_scale.unwrap_or(0.0),
    }))
}

/// Numeric value of `term` at `point` under the shared-ε limit.
pub fn regularized_term_value<T: Scalar>(
    term: &GammaProduct,
    point: &Point,
    bindings: &Bindings,
    mode: PochMode,
) -> Result<TermValue<T>, BindingError> {
    Ok(regularize::<T>(term, point, bindings, mode)?.term_value())
}
