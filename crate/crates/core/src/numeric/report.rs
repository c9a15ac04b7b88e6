use std::collections::BTreeMap;

use serde::Serialize;

use crate::scalar::Scalar;
use crate::types::Classification;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One series solution as seen by the verifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRecord {
    pub integrand: usize,
    pub free_indices: Vec<String>,
    pub substitutions: BTreeMap<String, String>,
    pub weight: String,
    pub classification: Option<Classification>,
    pub value: Option<f64>,
    pub terms_used: usize,
}

/// Engine value against the quadrature oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport<T> {
    pub engine_value: Option<T>,
    pub oracle_value: Option<T>,
    pub abs_error: Option<T>,
    pub rel_error: Option<T>,
    pub tolerance: T,
    pub terms_used: usize,
    pub classification_log: Vec<SolutionRecord>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl<T: Scalar> EvaluationReport<T> {
    /// Builds a report and decides the verdict. Relative error is the
    /// criterion unless the oracle value is within `tol` of zero, in which
    /// case the absolute error is used.
    pub fn judge(
        engine_value: Option<T>,
        oracle_value: Option<T>,
        tolerance: T,
        terms_used: usize,
        classification_log: Vec<SolutionRecord>,
        mut reasons: Vec<String>,
    ) -> Self {
        let (abs_error, rel_error) = match (engine_value, oracle_value) {
            (Some(e), Some(o)) => {
                let abs = (e - o).abs();
                let rel = if o.is_zero() { None } else { Some(abs / o.abs()) };
                (Some(abs), rel)
            }
            _ => (None, None),
        };
        let pass = match (abs_error, rel_error, oracle_value) {
            (Some(abs), _, Some(o)) if o.abs() <= tolerance => abs <= tolerance,
            (_, Some(rel), _) => rel <= tolerance,
            _ => false,
        };
        if !pass && reasons.is_empty() {
            if let Some(rel) = rel_error {
                reasons.push(format!(
                    "relative error {:e} exceeds tolerance {:e}",
                    rel.to_f64().unwrap_or(f64::NAN),
                    tolerance.to_f64().unwrap_or(f64::NAN)
                ));
            } else if let Some(abs) = abs_error {
                reasons.push(format!(
                    "absolute error {:e} exceeds tolerance {:e}",
                    abs.to_f64().unwrap_or(f64::NAN),
                    tolerance.to_f64().unwrap_or(f64::NAN)
                ));
            }
        }
        Self {
            engine_value,
            oracle_value,
            abs_error,
            rel_error,
            tolerance,
            terms_used,
            classification_log,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            reasons,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let r = EvaluationReport::judge(Some(1.0), Some(1.0 + 1e-9), 1e-6, 3, vec![], vec![]);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = EvaluationReport::judge(Some(0.5_f64), Some(1.0), 1e-6, 3, vec![], vec![]);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!((r.rel_error.unwrap() - 0.5).abs() < 1e-15);
        assert!(!r.reasons.is_empty());
        let r = EvaluationReport::judge(Some(1e-9), Some(0.0), 1e-6, 1, vec![], vec![]);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = EvaluationReport::<f64>::judge(None, Some(1.0), 1e-6, 0, vec![], vec!["x".into()]);
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
