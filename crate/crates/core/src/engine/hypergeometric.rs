use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exact::{fmt_rational, pow_int};
use crate::types::{AffineForm, Param, SeriesSolution};

/// `c · Π bᵢ^{eᵢ} · Π pⱼ^{fⱼ}` with rational exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperArgument {
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
    #[serde(skip)]
    pub numeric_powers: BTreeMap<BigRational, BigRational>,
    #[serde(skip)]
    pub param_powers: BTreeMap<Param, BigRational>,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

impl fmt::Display for HyperArgument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.coefficient.is_one() || (self.numeric_powers.is_empty() && self.param_powers.is_empty()) {
            parts.push(fmt_rational(&self.coefficient));
        }
        let pow = |base: String, e: &BigRational| {
            if e.is_one() {
                base
            } else if e.is_integer() && e > &BigRational::zero() {
                format!("{base}^{}", e.numer())
            } else {
                format!("{base}^({})", fmt_rational(e))
            }
        };
        for (b, e) in &self.numeric_powers {
            parts.push(pow(fmt_rational(b), e));
        }
        for (p, e) in &self.param_powers {
            parts.push(pow(p.to_string(), e));
        }
        f.write_str(&parts.join("*"))
    }
}

/// `Σ_m [Π (aᵢ)_m / Π (bⱼ)_m] zᵐ / m!`, identified from the term ratio of a
/// one-index solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypergeometric {
    #[serde(serialize_with = "ser_forms")]
    pub numerator: Vec<AffineForm>,
    #[serde(serialize_with = "ser_forms")]
    pub denominator: Vec<AffineForm>,
    pub argument: HyperArgument,
}

fn ser_forms<S: serde::Serializer>(v: &[AffineForm], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

impl fmt::Display for Hypergeometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[AffineForm]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "{}F{}({}; {}; {})",
            self.numerator.len(),
            self.denominator.len(),
            list(&self.numerator),
            list(&self.denominator),
            self.argument
        )
    }
}

/// Linear factors `(m + u)` of a term ratio with multiplicity.
#[derive(Default)]
struct Ratio {
    scale: BigRational,
    factors: BTreeMap<AffineForm, i64>,
    numeric: BTreeMap<BigRational, BigRational>,
    params: BTreeMap<Param, BigRational>,
}

impl Ratio {
    fn linear(&mut self, u: AffineForm, mult: i64) {
        *self.factors.entry(u).or_insert(0) += mult;
    }
}

/// Recognizes `t(m+1)/t(m)` as a rational function of `m` and returns the
/// corresponding generalized hypergeometric descriptor. `None` when the
/// solution does not have exactly one free index or a gamma argument has a
/// non-integer slope.
pub fn to_hypergeometric(sol: &SeriesSolution) -> Option<Hypergeometric> {
    let [m] = sol.free_indices[..] else {
        return None;
    };
    let mut r = Ratio { scale: BigRational::one(), ..Ratio::default() };
    if sol.term.has_indicator(m) {
        // φ_{m+1}/φ_m = -1/(m+1)
        r.scale = -r.scale;
        r.linear(AffineForm::integer(1), -1);
    }
    for (arg, sigma) in sol.term.gamma_factors() {
        let k = arg.index_coeff(m);
        if k.is_zero() {
            continue;
        }
        if !k.is_integer() {
            return None;
        }
        let c = arg.without_index(m);
        let kk: i64 = k.to_integer().try_into().ok()?;
        let sigma = i64::from(sigma);
        // Γ(c+k(m+1))/Γ(c+km) = k^k Π_{j<k} (m + (c+j)/k) for k > 0,
        // and 1/(|k|^{|k|}·sgn Π_{j=1..|k|} (m + (c-j)/k)) for k < 0.
        if kk > 0 {
            r.scale *= pow_int(&k, kk * sigma);
            for j in 0..kk {
                r.linear((c.clone() + AffineForm::integer(j)).scale(&(BigRational::one() / &k)), sigma);
            }
        } else {
            let a = -kk;
            r.scale *= pow_int(&k, -a * sigma);
            for j in 1..=a {
                r.linear((c.clone() - AffineForm::integer(j)).scale(&(BigRational::one() / &k)), -sigma);
            }
        }
    }
    for (base, e) in sol.term.numeric_powers() {
        let s = e.index_coeff(m);
        if !s.is_zero() {
            *r.numeric.entry(base.clone()).or_insert_with(BigRational::zero) += s;
        }
    }
    for (p, e) in sol.term.param_powers() {
        let s = e.index_coeff(m);
        if !s.is_zero() {
            *r.params.entry(p.clone()).or_insert_with(BigRational::zero) += s;
        }
    }

    // Integer powers of rational bases fold into the coefficient.
    let mut numeric_powers = BTreeMap::new();
    for (b, e) in r.numeric {
        if e.is_zero() {
            continue;
        }
        match e.is_integer().then(|| i64::try_from(e.to_integer()).ok()).flatten() {
            Some(k) => r.scale *= pow_int(&b, k),
            None => {
                numeric_powers.insert(b, e);
            }
        }
    }
    r.params.retain(|_, e| !e.is_zero());

    // One copy of (m+1) in the denominator is the m! of the standard form.
    let one = AffineForm::integer(1);
    *r.factors.entry(one).or_insert(0) += 1;
    let mut numerator = Vec::new();
    let mut denominator = Vec::new();
    for (u, mult) in r.factors {
        let target = if mult > 0 { &mut numerator } else { &mut denominator };
        for _ in 0..mult.unsigned_abs() {
            target.push(u.clone());
        }
    }
    Some(Hypergeometric {
        numerator,
        denominator,
        argument: HyperArgument { coefficient: r.scale, numeric_powers, param_powers: r.params },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::enumerate_solutions;
    use crate::exact::{int, rat};
    use crate::expansion::expand_integrand;
    use crate::parser::parse_integrands;
    use crate::types::{GammaProduct, IndexVar};

    #[test]
    fn flagship_is_binomial_series() {
        let bs = expand_integrand(&parse_integrands("besselj(0,a*x)*sin(b*x)").unwrap()[0]).unwrap().remove(0);
        let sols = enumerate_solutions(&bs).unwrap();
        let h = to_hypergeometric(&sols[1]).unwrap();
        assert_eq!(h.numerator, vec![AffineForm::constant(rat(1, 2))]);
        assert!(h.denominator.is_empty());
        assert_eq!(h.argument.coefficient, int(1));
        assert_eq!(h.argument.param_powers[&Param::new("a")], int(2));
        assert_eq!(h.argument.param_powers[&Param::new("b")], int(-2));
        assert_eq!(h.to_string(), "1F0(1/2; ; a^2*b^(-2))");
    }

    #[test]
    fn exponential_series() {
        let n = IndexVar::new(1);
        let sol = SeriesSolution {
            free_indices: vec![n],
            eliminated: vec![],
            term: GammaProduct::one().with_indicator(n).with_param_power(Param::new("z"), AffineForm::index(n)),
            weight: int(1),
            substitutions: BTreeMap::new(),
            classification: None,
        };
        let h = to_hypergeometric(&sol).unwrap();
        assert!(h.numerator.is_empty() && h.denominator.is_empty());
        assert_eq!(h.argument.coefficient, int(-1));
        assert_eq!(h.to_string(), "0F0(; ; -1*z)");
    }

    #[test]
    fn no_free_index() {
        let bs = expand_integrand(&parse_integrands("exp(-x)").unwrap()[0]).unwrap().remove(0);
        let sols = enumerate_solutions(&bs).unwrap();
        assert!(to_hypergeometric(&sols[0]).is_none());
    }
}
