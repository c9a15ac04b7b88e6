use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::bindings::{BindingError, Bindings, Point};
use super::index::{IndexVar, SymbolicConst};
use crate::exact::fmt_rational;

/// Exact affine expression `Σ cᵢ nᵢ + Σ dⱼ sⱼ + c₀` over summation indices and
/// symbolic constants.
///
/// Zero coefficients are never stored, so derived equality and ordering are
/// structural and agree with mathematical equality. Ordering is lexicographic on
/// (index coefficients, symbolic coefficients, constant).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AffineForm {
    index_coeffs: BTreeMap<IndexVar, BigRational>,
    sym_coeffs: BTreeMap<SymbolicConst, BigRational>,
    constant: BigRational,
}

impl AffineForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self { constant: c, ..Self::default() }
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn index(v: IndexVar) -> Self {
        Self::zero().with_index(v, BigRational::one())
    }

    pub fn sym(c: SymbolicConst) -> Self {
        Self::zero().with_sym(c, BigRational::one())
    }

    /// Adds `coeff · v` to the form.
    pub fn with_index(mut self, v: IndexVar, coeff: BigRational) -> Self {
        accumulate(&mut self.index_coeffs, v, coeff);
        self
    }

    pub fn with_sym(mut self, c: SymbolicConst, coeff: BigRational) -> Self {
        accumulate(&mut self.sym_coeffs, c, coeff);
        self
    }

    pub fn with_constant(mut self, c: BigRational) -> Self {
        self.constant += c;
        self
    }

    pub fn index_coeff(&self, v: IndexVar) -> BigRational {
        self.index_coeffs.get(&v).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn sym_coeff(&self, c: &SymbolicConst) -> BigRational {
        self.sym_coeffs.get(c).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_part(&self) -> &BigRational {
        &self.constant
    }

    pub fn index_terms(&self) -> impl Iterator<Item = (IndexVar, &BigRational)> {
        self.index_coeffs.iter().map(|(v, c)| (*v, c))
    }

    pub fn sym_terms(&self) -> impl Iterator<Item = (&SymbolicConst, &BigRational)> {
        self.sym_coeffs.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = IndexVar> + '_ {
        self.index_coeffs.keys().copied()
    }

    pub fn sym_consts(&self) -> impl Iterator<Item = &SymbolicConst> {
        self.sym_coeffs.keys()
    }

    pub fn mentions(&self, v: IndexVar) -> bool {
        self.index_coeffs.contains_key(&v)
    }

    /// True when the form does not involve any summation index.
    pub fn is_index_free(&self) -> bool {
        self.index_coeffs.is_empty()
    }

    /// True when the form is a plain rational number.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.index_coeffs.is_empty() && self.sym_coeffs.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_rational().is_some_and(Zero::is_zero)
    }

    /// Sum of the index coefficients: the rate at which the form moves when
    /// every index is shifted by the same amount.
    pub fn slope(&self) -> BigRational {
        self.index_coeffs.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            index_coeffs: self.index_coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            sym_coeffs: self.sym_coeffs.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Returns the form with the terms in `v` removed.
    pub fn without_index(&self, v: IndexVar) -> Self {
        let mut out = self.clone();
        out.index_coeffs.remove(&v);
        out
    }

    /// Replaces each index in the domain of `subs` by its image; other indices
    /// are left untouched.
    pub fn substitute(&self, subs: &BTreeMap<IndexVar, AffineForm>) -> Self {
        let mut out = Self {
            index_coeffs: BTreeMap::new(),
            sym_coeffs: self.sym_coeffs.clone(),
            constant: self.constant.clone(),
        };
        for (v, c) in &self.index_coeffs {
            match subs.get(v) {
                Some(image) => out = out + image.scale(c),
                None => accumulate(&mut out.index_coeffs, *v, c.clone()),
            }
        }
        out
    }

    /// Renames indices; indices outside the map are kept.
    pub fn relabel(&self, map: &BTreeMap<IndexVar, IndexVar>) -> Self {
        let subs = map.iter().map(|(from, to)| (*from, AffineForm::index(*to))).collect();
        self.substitute(&subs)
    }

    /// Evaluates the form exactly at a lattice point with bound constants.
    pub fn eval_exact(&self, point: &Point, bindings: &Bindings) -> Result<BigRational, BindingError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.index_coeffs {
            let n = point.get(v).ok_or(BindingError::UnassignedIndex(*v))?;
            acc += c * BigInt::from(*n);
        }
        for (s, c) in &self.sym_coeffs {
            acc += c * bindings.constant(s)?;
        }
        Ok(acc)
    }

    /// Substitutes bound constant values, leaving indices symbolic.
    pub fn bind_consts(&self, bindings: &Bindings) -> Result<Self, BindingError> {
        let mut constant = self.constant.clone();
        for (s, c) in &self.sym_coeffs {
            constant += c * bindings.constant(s)?;
        }
        Ok(Self { index_coeffs: self.index_coeffs.clone(), sym_coeffs: BTreeMap::new(), constant })
    }

    pub fn collect_indices(&self, into: &mut BTreeSet<IndexVar>) {
        into.extend(self.index_coeffs.keys().copied());
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, BigRational>, key: K, coeff: BigRational) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl Add for AffineForm {
    type Output = AffineForm;

    fn add(mut self, rhs: AffineForm) -> AffineForm {
        for (v, c) in rhs.index_coeffs {
            accumulate(&mut self.index_coeffs, v, c);
        }
        for (s, c) in rhs.sym_coeffs {
            accumulate(&mut self.sym_coeffs, s, c);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Add<&AffineForm> for &AffineForm {
    type Output = AffineForm;

    fn add(self, rhs: &AffineForm) -> AffineForm {
        self.clone() + rhs.clone()
    }
}

impl Neg for AffineForm {
    type Output = AffineForm;

    fn neg(self) -> AffineForm {
        self.scale(&-BigRational::one())
    }
}

impl Sub for AffineForm {
    type Output = AffineForm;

    fn sub(self, rhs: AffineForm) -> AffineForm {
        self + (-rhs)
    }
}

impl Sub<&AffineForm> for &AffineForm {
    type Output = AffineForm;

    fn sub(self, rhs: &AffineForm) -> AffineForm {
        self.clone() - rhs.clone()
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: &BigRational, name: Option<&dyn fmt::Display>| {
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            match name {
                Some(n) if mag.is_one() => write!(f, "{n}"),
                Some(n) => write!(f, "{}*{n}", fmt_rational(&mag)),
                None => f.write_str(&fmt_rational(&mag)),
            }
        };
        for (v, c) in &self.index_coeffs {
            term(f, c, Some(v))?;
        }
        for (s, c) in &self.sym_coeffs {
            term(f, c, Some(s))?;
        }
        if !self.constant.is_zero() {
            term(f, &self.constant, None)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn n(i: u32) -> IndexVar {
        IndexVar::new(i)
    }

    #[test]
    fn substitution_solves_the_bracket() {
        let (m, nn) = (n(1), n(2));
        let bracket = AffineForm::integer(2).with_index(m, int(2)).with_index(nn, int(2));
        let mut subs = BTreeMap::new();
        subs.insert(nn, AffineForm::integer(-1).with_index(m, int(-1)));
        assert!(bracket.substitute(&subs).is_zero());
    }

    #[test]
    fn identity_and_linear_composition() {
        let m = n(1);
        let form = AffineForm::index(m);
        assert_eq!(form.substitute(&BTreeMap::new()), form);

        let s = SymbolicConst::new("s");
        let k = n(7);
        let form = AffineForm::sym(s.clone()).with_index(m, int(3));
        let mut subs = BTreeMap::new();
        subs.insert(m, AffineForm::zero().with_index(k, int(2)));
        let expected = AffineForm::sym(s).with_index(k, int(6));
        assert_eq!(form.substitute(&subs), expected);
    }

    #[test]
    fn cancellation_removes_entries() {
        let m = n(1);
        let a = AffineForm::index(m).with_constant(rat(1, 2));
        let b = AffineForm::index(m);
        let d = a - b;
        assert_eq!(d, AffineForm::constant(rat(1, 2)));
        assert_eq!(d.as_rational(), Some(&rat(1, 2)));
    }

    #[test]
    fn display_is_canonical() {
        let s = SymbolicConst::new("s");
        let f = AffineForm::integer(-1).with_index(n(2), int(2)).with_sym(s, int(1)).with_index(n(1), rat(-1, 2));
        assert_eq!(f.to_string(), "-1/2*n1 + 2*n2 + s - 1");
        assert_eq!(AffineForm::zero().to_string(), "0");
    }
}
