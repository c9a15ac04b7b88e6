use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::affine::AffineForm;
use super::index::{IndexVar, Param, SymbolicConst};
use crate::exact::{as_i64, factorial, fmt_rational, pow_int};

/// Coefficient of a bracket-series term:
///
/// `prefactor · Π pᵢ^{eᵢ} · Π cⱼ^{fⱼ} · Π Γ(Lₖ)^{σₖ} · Π φₙ`
///
/// where the `pᵢ` are scale parameters, the `cⱼ` positive rational bases and
/// `φₙ = (-1)ⁿ/Γ(n+1)` the indicator of index `n`. Gamma factors with equal
/// arguments share one entry whose exponent is the sum; zero exponents vanish.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaProduct {
    prefactor: BigRational,
    param_powers: BTreeMap<Param, AffineForm>,
    numeric_powers: BTreeMap<BigRational, AffineForm>,
    gamma_factors: BTreeMap<AffineForm, i32>,
    indicators: BTreeSet<IndexVar>,
}

impl Default for GammaProduct {
    fn default() -> Self {
        Self::one()
    }
}

impl GammaProduct {
    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self {
            prefactor: q,
            param_powers: BTreeMap::new(),
            numeric_powers: BTreeMap::new(),
            gamma_factors: BTreeMap::new(),
            indicators: BTreeSet::new(),
        }
    }

    pub fn with_prefactor(mut self, q: BigRational) -> Self {
        self.prefactor *= q;
        self.normalized()
    }

    /// Multiplies by `Γ(arg)^exponent`.
    pub fn with_gamma(mut self, arg: AffineForm, exponent: i32) -> Self {
        *self.gamma_factors.entry(arg).or_insert(0) += exponent;
        self.normalized()
    }

    /// Multiplies by `p^exponent`.
    pub fn with_param_power(mut self, p: Param, exponent: AffineForm) -> Self {
        let slot = self.param_powers.entry(p).or_default();
        *slot = &*slot + &exponent;
        self.normalized()
    }

    /// Multiplies by `base^exponent` for a positive rational `base`.
    pub fn with_numeric_power(mut self, base: BigRational, exponent: AffineForm) -> Self {
        assert!(base.is_positive(), "numeric power bases must be positive");
        let slot = self.numeric_powers.entry(base).or_default();
        *slot = &*slot + &exponent;
        self.normalized()
    }

    pub fn with_indicator(mut self, v: IndexVar) -> Self {
        self.indicators.insert(v);
        self
    }

    pub fn without_indicator(mut self, v: IndexVar) -> Self {
        self.indicators.remove(&v);
        self
    }

    pub fn prefactor(&self) -> &BigRational {
        &self.prefactor
    }

    pub fn param_powers(&self) -> impl Iterator<Item = (&Param, &AffineForm)> {
        self.param_powers.iter()
    }

    pub fn numeric_powers(&self) -> impl Iterator<Item = (&BigRational, &AffineForm)> {
        self.numeric_powers.iter()
    }

    pub fn gamma_factors(&self) -> impl Iterator<Item = (&AffineForm, i32)> {
        self.gamma_factors.iter().map(|(a, e)| (a, *e))
    }

    pub fn indicators(&self) -> &BTreeSet<IndexVar> {
        &self.indicators
    }

    pub fn has_indicator(&self, v: IndexVar) -> bool {
        self.indicators.contains(&v)
    }

    /// Product of two terms. Indicator sets are expected to be disjoint.
    pub fn mul(&self, other: &GammaProduct) -> GammaProduct {
        let mut out = self.clone();
        out.prefactor *= &other.prefactor;
        for (p, e) in &other.param_powers {
            let slot = out.param_powers.entry(p.clone()).or_default();
            *slot = &*slot + e;
        }
        for (b, e) in &other.numeric_powers {
            let slot = out.numeric_powers.entry(b.clone()).or_default();
            *slot = &*slot + e;
        }
        for (a, e) in &other.gamma_factors {
            *out.gamma_factors.entry(a.clone()).or_insert(0) += e;
        }
        out.indicators.extend(other.indicators.iter().copied());
        out.normalized()
    }

    /// Applies an index substitution to every affine form in the term.
    /// Indicators of substituted indices are left for the caller to consume.
    pub fn substitute(&self, subs: &BTreeMap<IndexVar, AffineForm>) -> GammaProduct {
        let mut out = GammaProduct::from_rational(self.prefactor.clone());
        out.indicators = self.indicators.clone();
        for (p, e) in &self.param_powers {
            let slot = out.param_powers.entry(p.clone()).or_default();
            *slot = &*slot + &e.substitute(subs);
        }
        for (b, e) in &self.numeric_powers {
            let slot = out.numeric_powers.entry(b.clone()).or_default();
            *slot = &*slot + &e.substitute(subs);
        }
        for (a, e) in &self.gamma_factors {
            *out.gamma_factors.entry(a.substitute(subs)).or_insert(0) += e;
        }
        out.normalized()
    }

    /// Renames indices, indicators included.
    pub fn relabel(&self, map: &BTreeMap<IndexVar, IndexVar>) -> GammaProduct {
        let subs = map.iter().map(|(from, to)| (*from, AffineForm::index(*to))).collect();
        let mut out = self.substitute(&subs);
        out.indicators = self.indicators.iter().map(|v| map.get(v).copied().unwrap_or(*v)).collect();
        out
    }

    /// Every index mentioned anywhere in the term.
    pub fn indices(&self) -> BTreeSet<IndexVar> {
        let mut out = self.indicators.clone();
        for e in self.param_powers.values() {
            e.collect_indices(&mut out);
        }
        for e in self.numeric_powers.values() {
            e.collect_indices(&mut out);
        }
        for a in self.gamma_factors.keys() {
            a.collect_indices(&mut out);
        }
        out
    }

    pub fn params(&self) -> impl Iterator<Item = &Param> {
        self.param_powers.keys()
    }

    pub fn sym_consts(&self) -> BTreeSet<SymbolicConst> {
        let mut out = BTreeSet::new();
        let forms = self.param_powers.values().chain(self.numeric_powers.values()).chain(self.gamma_factors.keys());
        for f in forms {
            out.extend(f.sym_consts().cloned());
        }
        out
    }

    /// Drops trivial factors and folds fully numeric ones into the prefactor:
    /// gamma factors at positive integers, integer powers of rational bases.
    fn normalized(mut self) -> Self {
        self.param_powers.retain(|_, e| !e.is_zero());
        self.gamma_factors.retain(|_, e| *e != 0);
        self.numeric_powers.retain(|b, e| !b.is_one() && !e.is_zero());

        let mut folded = BigRational::one();
        self.gamma_factors.retain(|arg, e| match arg.as_rational().and_then(as_i64) {
            Some(n) if n >= 1 => {
                let g = BigRational::from_integer(factorial((n - 1) as u64));
                folded *= pow_int(&g, i64::from(*e));
                false
            }
            _ => true,
        });
        self.numeric_powers.retain(|b, e| match e.as_rational().and_then(as_i64) {
            Some(k) => {
                folded *= pow_int(b, k);
                false
            }
            None => true,
        });
        self.prefactor *= folded;
        if self.prefactor.is_zero() {
            let indicators = std::mem::take(&mut self.indicators);
            self = GammaProduct::from_rational(BigRational::zero());
            self.indicators = indicators;
        }
        self
    }
}

impl fmt::Display for GammaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.prefactor.is_one() {
            parts.push(fmt_rational(&self.prefactor));
        }
        for v in &self.indicators {
            parts.push(format!("phi({v})"));
        }
        for (b, e) in &self.numeric_powers {
            parts.push(format!("({})^({e})", fmt_rational(b)));
        }
        for (p, e) in &self.param_powers {
            parts.push(format!("{p}^({e})"));
        }
        for (a, e) in &self.gamma_factors {
            if *e == 1 {
                parts.push(format!("Gamma({a})"));
            } else {
                parts.push(format!("Gamma({a})^({e})"));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" * "))
        }
    }
}
