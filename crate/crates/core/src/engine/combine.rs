use super::{classify, EngineError};
use crate::numeric::{sum_series, NeumaierSum, SeriesSum};
use crate::pochhammer::PochMode;
use crate::scalar::Scalar;
use crate::types::{Bindings, SeriesSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionValue<T> {
    /// The solution with its classification filled in.
    pub solution: SeriesSolution,
    /// Present for solutions that contribute.
    pub sum: Option<SeriesSum<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedValue<T> {
    pub value: T,
    pub terms_used: usize,
    pub solutions: Vec<SolutionValue<T>>,
}

/// Classifies any unclassified solutions, discards null and divergent ones
/// and adds the sums of the rest in input order.
pub fn combine<T: Scalar>(
    sols: &[SeriesSolution],
    bindings: &Bindings,
    tol: T,
    max_terms: usize,
    mode: PochMode,
) -> Result<CombinedValue<T>, EngineError> {
    let mut total = NeumaierSum::new();
    let mut terms_used = 0;
    let mut any = false;
    let mut out = Vec::with_capacity(sols.len());
    for sol in sols {
        let mut sol = sol.clone();
        let class = match &sol.classification {
            Some(c) => c.clone(),
            None => classify(&sol, bindings, mode)?,
        };
        sol.classification = Some(class.clone());
        let sum = if class.contributes() {
            let s = sum_series(&sol, bindings, tol, max_terms, mode)?;
            total.add(s.value);
            terms_used += s.terms_used;
            any = true;
            Some(s)
        } else {
            None
        };
        out.push(SolutionValue { solution: sol, sum });
    }
    if !any {
        return Err(EngineError::NoConvergentSolution);
    }
    Ok(CombinedValue { value: total.value(), terms_used, solutions: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::enumerate_solutions;
    use crate::expansion::expand_integrand;
    use crate::lattice;
    use crate::parser::parse_integrands;
    use crate::pochhammer::{regularized_term_value, TermValue};
    use crate::types::{BracketSeries, Classification};

    fn flagship() -> BracketSeries {
        expand_integrand(&parse_integrands("besselj(0,a*x)*sin(b*x)").unwrap()[0]).unwrap().remove(0)
    }

    fn ab(a: f64, b: f64) -> Bindings {
        Bindings::new().with_param("a", a).with_param("b", b)
    }

    #[test]
    fn flagship_classifications() {
        let sols = enumerate_solutions(&flagship()).unwrap();
        let b = ab(1.0, 2.0);
        assert_eq!(classify(&sols[0], &b, PochMode::Regularized).unwrap(), Classification::Null);
        match classify(&sols[1], &b, PochMode::Regularized).unwrap() {
            Classification::Convergent { ratio } => assert!((ratio - 0.25).abs() < 0.01, "{ratio}"),
            other => panic!("{other:?}"),
        }
        let b = ab(2.0, 1.0);
        assert!(matches!(classify(&sols[1], &b, PochMode::Regularized).unwrap(), Classification::Divergent { .. }));
    }

    #[test]
    fn null_solution_terms_vanish() {
        let sols = enumerate_solutions(&flagship()).unwrap();
        let null = &sols[0];
        let b = ab(1.0, 2.0);
        for s in 0..50 {
            let p = lattice::point(&null.free_indices, &[s]);
            let v = regularized_term_value::<f64>(&null.term, &p, &b, PochMode::Regularized).unwrap();
            assert_eq!(v, TermValue::Zero);
        }
    }

    #[test]
    fn flagship_value_and_region() {
        let sols = enumerate_solutions(&flagship()).unwrap();
        let c = combine(&sols, &ab(1.0, 2.0), 1e-12, 10_000, PochMode::Regularized).unwrap();
        assert!((c.value - 1.0 / 3f64.sqrt()).abs() < 1e-12, "{}", c.value);
        assert!(c.solutions[0].sum.is_none());
        let c = combine(&sols, &ab(0.0, 1.0), 1e-12, 10_000, PochMode::Regularized).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(
            combine::<f64>(&sols, &ab(2.0, 1.0), 1e-12, 10_000, PochMode::Regularized),
            Err(EngineError::NoConvergentSolution)
        );
        let legacy = combine(&sols, &ab(1.0, 2.0), 1e-12, 10_000, PochMode::Legacy).unwrap();
        assert!((legacy.value / (1.0 / 3f64.sqrt()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_finite_value() {
        let bs = expand_integrand(&parse_integrands("exp(-x)").unwrap()[0]).unwrap().remove(0);
        let sols = enumerate_solutions(&bs).unwrap();
        let c = combine(&sols, &Bindings::new(), 1e-12, 100, PochMode::Regularized).unwrap();
        assert_eq!(c.value, 1.0);
    }
}
