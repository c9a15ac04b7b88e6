//! Power-series expansion of catalog atoms and assembly of bracket series.

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::exact::int;
use crate::expr::{Atom, Coeff, Integrand, Monomial};
use crate::types::{AffineForm, BracketSeries, GammaProduct, IndexAllocator, IndexVar, IndexedSeries};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum ExpansionError {
    #[error("atom `{0}` has no series expansion")]
    UnsupportedAtom(String),
    #[error("index {0} occurs in both factors")]
    IndexCollision(IndexVar),
    #[error("a multinomial needs at least two terms")]
    FewerThanTwoTerms,
}

/// `coeff^exponent` as a gamma-product factor. Coefficients raised to a
/// non-integer or index-dependent power must have a positive rational part.
fn coeff_power(c: &Coeff, exponent: &AffineForm) -> Result<GammaProduct, ExpansionError> {
    let mut g = GammaProduct::one();
    let q = &c.rational;
    if !q.is_one() {
        if q.is_positive() {
            g = g.with_numeric_power(q.clone(), exponent.clone());
        } else {
            return Err(ExpansionError::UnsupportedAtom(format!("non-positive coefficient {c} raised to {exponent}")));
        }
    }
    for (p, k) in &c.params {
        g = g.with_param_power(p.clone(), exponent.scale(&int(i64::from(*k))));
    }
    Ok(g)
}

fn scalar_series(c: &Coeff) -> IndexedSeries {
    let mut term = GammaProduct::from_rational(c.rational.clone());
    for (p, k) in &c.params {
        term = term.with_param_power(p.clone(), AffineForm::integer(i64::from(*k)));
    }
    IndexedSeries { term, ..IndexedSeries::unit() }
}

/// Canonical indexed power series of a single atom, using fresh indices from
/// `alloc`. Multinomials use the multinomial bracket expansion.
pub fn expand_atom(atom: &Atom, alloc: &mut IndexAllocator) -> Result<IndexedSeries, ExpansionError> {
    let two = || int(2);
    match atom {
        Atom::Power(e) => Ok(IndexedSeries { x_exponent: e.clone(), ..IndexedSeries::unit() }),
        Atom::Scalar(c) => Ok(scalar_series(c)),
        Atom::Exp { coeff, power } => {
            let n = alloc.fresh();
            let nf = AffineForm::index(n);
            let term = coeff_power(coeff, &nf)?.with_indicator(n);
            Ok(IndexedSeries { indices: vec![n], term, x_exponent: nf.scale(power), pending_brackets: Vec::new() })
        }
        Atom::Sin(b) => {
            let n = alloc.fresh();
            let e = AffineForm::index(n).scale(&two()).with_constant(int(1));
            let term = coeff_power(b, &e)?
                .with_indicator(n)
                .with_gamma(AffineForm::index(n).with_constant(int(1)), 1)
                .with_gamma(AffineForm::index(n).scale(&two()).with_constant(int(2)), -1);
            Ok(IndexedSeries { indices: vec![n], term, x_exponent: e, pending_brackets: Vec::new() })
        }
        Atom::Cos(b) => {
            let n = alloc.fresh();
            let e = AffineForm::index(n).scale(&two());
            let term = coeff_power(b, &e)?
                .with_indicator(n)
                .with_gamma(AffineForm::index(n).with_constant(int(1)), 1)
                .with_gamma(AffineForm::index(n).scale(&two()).with_constant(int(1)), -1);
            Ok(IndexedSeries { indices: vec![n], term, x_exponent: e, pending_brackets: Vec::new() })
        }
        Atom::BesselJ { order, coeff } => {
            let m = alloc.fresh();
            let e = AffineForm::index(m).scale(&two()) + order.clone();
            let term = coeff_power(coeff, &e)?
                .with_indicator(m)
                .with_gamma(AffineForm::index(m) + order.clone().with_constant(int(1)), -1)
                .with_numeric_power(two(), -e.clone());
            Ok(IndexedSeries { indices: vec![m], term, x_exponent: e, pending_brackets: Vec::new() })
        }
        Atom::Multinomial { terms, exponent } => expand_multinomial(terms, exponent, alloc),
    }
}

/// `(Σ cᵢ x^{pᵢ})^α = Σ φ_{n₁…n_r} Π cᵢ^{nᵢ} x^{Σ pᵢnᵢ} ⟨−α + Σ nᵢ⟩ / Γ(−α)`.
pub fn expand_multinomial(
    terms: &[Monomial],
    alpha: &AffineForm,
    alloc: &mut IndexAllocator,
) -> Result<IndexedSeries, ExpansionError> {
    if terms.len() < 2 {
        return Err(ExpansionError::FewerThanTwoTerms);
    }
    let mut term = GammaProduct::one().with_gamma(-alpha.clone(), -1);
    let mut x_exponent = AffineForm::zero();
    let mut bracket = -alpha.clone();
    let mut indices = Vec::with_capacity(terms.len());
    for t in terms {
        let n = alloc.fresh();
        let nf = AffineForm::index(n);
        term = term.mul(&coeff_power(&t.coeff, &nf)?).with_indicator(n);
        x_exponent = x_exponent + nf.scale(&t.power);
        bracket = bracket + nf;
        indices.push(n);
    }
    Ok(IndexedSeries { indices, term, x_exponent, pending_brackets: vec![bracket] })
}

/// Binomial series of `(A + B)^β` about the dominant term `A`:
/// `Σ φₙ Γ(n−β)/Γ(−β) A^{β−n} Bⁿ`.
pub fn expand_binomial(
    dominant: &Monomial,
    other: &Monomial,
    beta: &AffineForm,
    alloc: &mut IndexAllocator,
) -> Result<IndexedSeries, ExpansionError> {
    let n = alloc.fresh();
    let nf = AffineForm::index(n);
    let a_exp = beta.clone() - nf.clone();
    let term = coeff_power(&dominant.coeff, &a_exp)?
        .mul(&coeff_power(&other.coeff, &nf)?)
        .with_indicator(n)
        .with_gamma(nf.clone() - beta.clone(), 1)
        .with_gamma(-beta.clone(), -1);
    let x_exponent = a_exp.scale(&dominant.power) + nf.scale(&other.power);
    Ok(IndexedSeries { indices: vec![n], term, x_exponent, pending_brackets: Vec::new() })
}

/// Product of two series in disjoint indices.
pub fn multiply_series(s1: &IndexedSeries, s2: &IndexedSeries) -> Result<IndexedSeries, ExpansionError> {
    if let Some(v) = s1.indices.iter().find(|v| s2.indices.contains(v)) {
        return Err(ExpansionError::IndexCollision(*v));
    }
    Ok(IndexedSeries {
        indices: s1.indices.iter().chain(&s2.indices).copied().collect(),
        term: s1.term.mul(&s2.term),
        x_exponent: &s1.x_exponent + &s2.x_exponent,
        pending_brackets: s1.pending_brackets.iter().chain(&s2.pending_brackets).cloned().collect(),
    })
}

/// Replaces `x^{e}` by the bracket `⟨e + 1⟩`, after any multinomial brackets.
pub fn to_bracket_series(s: &IndexedSeries) -> BracketSeries {
    let mut brackets = s.pending_brackets.clone();
    brackets.push(s.x_exponent.clone().with_constant(BigRational::one()));
    BracketSeries { indices: s.indices.clone(), term: s.term.clone(), brackets }
}

/// Number of registered expansions of `atom`.
fn alternatives(atom: &Atom) -> usize {
    match atom {
        Atom::Multinomial { terms, .. } if terms.len() == 2 => 3,
        _ => 1,
    }
}

fn expand_choice(atom: &Atom, choice: usize, alloc: &mut IndexAllocator) -> Result<IndexedSeries, ExpansionError> {
    match (atom, choice) {
        (Atom::Multinomial { terms, exponent }, 1) => expand_binomial(&terms[0], &terms[1], exponent, alloc),
        (Atom::Multinomial { terms, exponent }, 2) => expand_binomial(&terms[1], &terms[0], exponent, alloc),
        _ => expand_atom(atom, alloc),
    }
}

/// Every registered bracket-series representation of `integrand`, in
/// generation order. Each representation numbers its indices from 1 in
/// factor order.
pub fn expand_integrand(integrand: &Integrand) -> Result<Vec<BracketSeries>, ExpansionError> {
    let counts: Vec<usize> = integrand.factors.iter().map(alternatives).collect();
    let mut choice = vec![0usize; counts.len()];
    let mut out = Vec::new();
    loop {
        let mut alloc = IndexAllocator::new();
        let mut series = IndexedSeries::unit();
        for (atom, &c) in integrand.factors.iter().zip(&choice) {
            series = multiply_series(&series, &expand_choice(atom, c, &mut alloc)?)?;
        }
        out.push(to_bracket_series(&series));
        // odometer, last factor fastest
        let mut k = counts.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < counts[k] {
                break;
            }
            choice[k] = 0;
        }
    }
}
