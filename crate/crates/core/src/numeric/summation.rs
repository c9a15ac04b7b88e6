use serde::Serialize;

use super::NumericError;
use crate::lattice;
use crate::pochhammer::{regularize, PochMode, Regularized};
use crate::scalar::{rational_to_scalar, Scalar};
use crate::types::{Bindings, SeriesSolution};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
pub struct NeumaierSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for NeumaierSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> NeumaierSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Scalar> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum<T> {
    pub value: T,
    pub terms_used: usize,
    /// Largest |term| in the last summed shell, weight included.
    pub last_term: T,
}

/// Consecutive negligible shells required before stopping.
const QUIET_SHELLS: usize = 5;

/// Sums `weight · Σ term` over the free-index lattice, shell by shell in
/// ascending total degree and lexicographic order within a shell. A shell is
/// negligible when its magnitude, scaled by the geometric tail `1/(1-r)` of
/// the observed decay rate `r`, falls below `tol · |sum|`.
pub fn sum_series<T: Scalar>(
    sol: &SeriesSolution,
    bindings: &Bindings,
    tol: T,
    max_terms: usize,
    mode: PochMode,
) -> Result<SeriesSum<T>, NumericError> {
    let weight: T = rational_to_scalar(&sol.weight);
    let d = sol.free_indices.len();
    let mut acc = NeumaierSum::new();
    let mut terms = 0usize;
    let mut quiet = 0usize;
    let mut last = T::zero();
    let mut prev_nonzero: Option<(u64, T)> = None;
    let mut tail_factor = T::one();
    for s in 0u64.. {
        let mut shell_max = T::zero();
        for coords in lattice::shell(d, s) {
            let point = lattice::point(&sol.free_indices, &coords);
            let t = match regularize::<T>(&sol.term, &point, bindings, mode)? {
                Regularized::Zero => T::zero(),
                Regularized::Divergent => {
                    return Err(NumericError::DivergentTermEncountered { point: format!("{point:?}") })
                }
                Regularized::Finite(v) => v.value() * weight,
            };
            if !t.is_finite() {
                return Err(NumericError::DivergentTermEncountered { point: format!("{point:?}") });
            }
            acc.add(t);
            shell_max = shell_max.max(t.abs());
            terms += 1;
        }
        last = shell_max;
        if d == 0 {
            break;
        }
        if shell_max > T::zero() {
            if let Some((p, m)) = prev_nonzero {
                let r = (shell_max / m).powf(T::one() / T::from_usize_lossy((s - p) as usize));
                tail_factor = if r < T::one() { T::one() / (T::one() - r) } else { T::infinity() };
            }
            prev_nonzero = Some((s, shell_max));
        }
        if shell_max * tail_factor <= tol * acc.value().abs() {
            quiet += 1;
            if quiet >= QUIET_SHELLS {
                break;
            }
        } else {
            quiet = 0;
        }
        if terms >= max_terms {
            return Err(NumericError::DidNotConverge { max_terms, last_term: last.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok(SeriesSum { value: acc.value(), terms_used: terms, last_term: last })
}
