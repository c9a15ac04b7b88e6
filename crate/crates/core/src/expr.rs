//! Integrand AST.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{fmt_rational, pow_int};
use crate::types::{AffineForm, Param, SymbolicConst};

/// A rational number times a product of parameters raised to integer powers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff {
    pub rational: BigRational,
    pub params: BTreeMap<Param, i32>,
}

impl Coeff {
    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(q: BigRational) -> Self {
        Self { rational: q, params: BTreeMap::new() }
    }

    pub fn param(p: Param) -> Self {
        let mut params = BTreeMap::new();
        params.insert(p, 1);
        Self { rational: BigRational::one(), params }
    }

    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.params.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.rational.is_positive()
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        let mut out = self.clone();
        out.rational *= &other.rational;
        for (p, k) in &other.params {
            *out.params.entry(p.clone()).or_insert(0) += k;
        }
        out.params.retain(|_, k| *k != 0);
        out
    }

    /// `self^k` for an integer `k`; `None` for a zero base with negative `k`.
    pub fn powi(&self, k: i64) -> Option<Coeff> {
        if self.rational.is_zero() && k < 0 {
            return None;
        }
        let mut params = BTreeMap::new();
        for (p, e) in &self.params {
            let pe = i64::from(*e) * k;
            if pe != 0 {
                params.insert(p.clone(), i32::try_from(pe).ok()?);
            }
        }
        Some(Coeff { rational: pow_int(&self.rational, k), params })
    }

    pub fn negated(&self) -> Coeff {
        Coeff { rational: -self.rational.clone(), params: self.params.clone() }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.params.is_empty() || !self.rational.abs().is_one() {
            parts.push(fmt_rational(&self.rational.abs()));
        }
        for (p, k) in &self.params {
            match k {
                1 => parts.push(p.to_string()),
                k if *k > 1 => parts.push(format!("{p}^{k}")),
                k => parts.push(format!("{p}^({k})")),
            }
        }
        if self.rational.is_negative() {
            f.write_str("-")?;
        }
        f.write_str(&parts.join("*"))
    }
}

/// One monomial `coeff · x^power` of a multinomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub coeff: Coeff,
    pub power: BigRational,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power.is_zero() {
            return write!(f, "{}", self.coeff);
        }
        if !self.coeff.is_one() {
            write!(f, "{}*", self.coeff)?;
        }
        write_x_power(f, &self.power)
    }
}

fn write_x_power(f: &mut fmt::Formatter<'_>, p: &BigRational) -> fmt::Result {
    if p.is_one() {
        f.write_str("x")
    } else if p.is_integer() && p.is_positive() {
        write!(f, "x^{}", p.numer())
    } else {
        write!(f, "x^({})", fmt_rational(p))
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &AffineForm) -> fmt::Result {
    match e.as_rational() {
        Some(q) if q.is_integer() && !q.is_negative() => write!(f, "^{}", q.numer()),
        _ => write!(f, "^({e})"),
    }
}

/// Catalog of supported integrand factors in the single variable `x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `x^e`.
    Power(AffineForm),
    /// `exp(-coeff · x^power)`.
    Exp { coeff: Coeff, power: BigRational },
    /// `sin(coeff · x)`.
    Sin(Coeff),
    /// `cos(coeff · x)`.
    Cos(Coeff),
    /// `J_order(coeff · x)`.
    BesselJ { order: AffineForm, coeff: Coeff },
    /// `(Σ monomials)^exponent` with at least two monomials.
    Multinomial { terms: Vec<Monomial>, exponent: AffineForm },
    /// A constant factor.
    Scalar(Coeff),
}

impl Atom {
    pub fn is_oscillatory(&self) -> bool {
        matches!(self, Atom::Sin(_) | Atom::Cos(_) | Atom::BesselJ { .. })
    }

    fn coeffs(&self) -> Vec<&Coeff> {
        match self {
            Atom::Power(_) => Vec::new(),
            Atom::Exp { coeff, .. } | Atom::Sin(coeff) | Atom::Cos(coeff) | Atom::Scalar(coeff) => {
                vec![coeff]
            }
            Atom::BesselJ { coeff, .. } => vec![coeff],
            Atom::Multinomial { terms, .. } => terms.iter().map(|t| &t.coeff).collect(),
        }
    }

    fn const_forms(&self) -> Vec<&AffineForm> {
        match self {
            Atom::Power(e) => vec![e],
            Atom::BesselJ { order, .. } => vec![order],
            Atom::Multinomial { exponent, .. } => vec![exponent],
            _ => Vec::new(),
        }
    }

    pub fn params(&self) -> BTreeSet<Param> {
        self.coeffs().into_iter().flat_map(|c| c.params.keys().cloned()).collect()
    }

    pub fn sym_consts(&self) -> BTreeSet<SymbolicConst> {
        self.const_forms().into_iter().flat_map(|f| f.sym_consts().cloned().collect::<Vec<_>>()).collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Power(e) => {
                f.write_str("x")?;
                match e.as_rational() {
                    Some(q) if q.is_one() => Ok(()),
                    _ => write_exponent(f, e),
                }
            }
            Atom::Exp { coeff, power } => {
                let mag = if coeff.rational.is_negative() {
                    f.write_str("exp(")?;
                    coeff.negated()
                } else {
                    f.write_str("exp(-")?;
                    coeff.clone()
                };
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write_x_power(f, power)?;
                f.write_str(")")
            }
            Atom::Sin(c) => write!(f, "sin({})", LinArg(c)),
            Atom::Cos(c) => write!(f, "cos({})", LinArg(c)),
            Atom::BesselJ { order, coeff } => {
                f.write_str("besselj(")?;
                match order.as_rational() {
                    Some(q) => f.write_str(&fmt_rational(q))?,
                    None if order.sym_terms().count() == 1
                        && order.constant_part().is_zero()
                        && order.sym_terms().all(|(_, c)| c.is_one()) =>
                    {
                        write!(f, "{order}")?
                    }
                    None => write!(f, "({order})")?,
                }
                write!(f, ", {})", LinArg(coeff))
            }
            Atom::Multinomial { terms, exponent } => {
                let parts: Vec<String> = terms.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(" + "))?;
                write_exponent(f, exponent)
            }
            Atom::Scalar(c) => write!(f, "{c}"),
        }
    }
}

struct LinArg<'a>(&'a Coeff);

impl fmt::Display for LinArg<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_one() {
            f.write_str("x")
        } else {
            write!(f, "{}*x", self.0)
        }
    }
}

/// Parsed integrand expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom(Atom),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn params(&self) -> BTreeSet<Param> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| out.extend(a.params()));
        out
    }

    pub fn sym_consts(&self) -> BTreeSet<SymbolicConst> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| out.extend(a.sym_consts()));
        out
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self {
            Expr::Atom(a) => f(a),
            Expr::Product(xs) | Expr::Sum(xs) => xs.iter().for_each(|x| x.visit_atoms(f)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Product(xs) => {
                let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join("*"))
            }
            Expr::Sum(xs) => {
                let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(" + "))
            }
        }
    }
}

/// A single product-form integrand: the factors multiply.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Integrand {
    pub factors: Vec<Atom>,
}

impl Integrand {
    pub fn params(&self) -> BTreeSet<Param> {
        self.factors.iter().flat_map(Atom::params).collect()
    }

    pub fn sym_consts(&self) -> BTreeSet<SymbolicConst> {
        self.factors.iter().flat_map(Atom::sym_consts).collect()
    }

    pub fn is_oscillatory(&self) -> bool {
        self.factors.iter().any(Atom::is_oscillatory)
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("*"))
    }
}
