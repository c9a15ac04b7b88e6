//! End-to-end evaluation: expansion, choice of representation, elimination,
//! classification, summation and verification.

use serde::Serialize;

use crate::engine::{choose_representation, classify, combine, enumerate_solutions, to_hypergeometric, SolutionValue};
use crate::error::Error;
use crate::exact::fmt_rational;
use crate::expansion::expand_integrand;
use crate::expr::Integrand;
use crate::numeric::{quadrature_oracle, EvaluationReport, SolutionRecord};
use crate::pochhammer::PochMode;
use crate::scalar::Scalar;
use crate::types::{BindingError, Bindings, BracketSeries, Classification, SeriesSolution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Relative truncation tolerance for series summation.
    pub tol: f64,
    pub max_terms: usize,
    pub mode: PochMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_terms: 10_000, mode: PochMode::Regularized }
    }
}

/// Symbolic stage for one integrand: all representations, the chosen one and
/// its unclassified solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub integrand: Integrand,
    pub representations: Vec<BracketSeries>,
    pub chosen: usize,
    pub solutions: Vec<SeriesSolution>,
}

pub fn solve(integrand: &Integrand) -> Result<Solved, Error> {
    let representations = expand_integrand(integrand)?;
    let (chosen, rep) = choose_representation(&representations)?;
    let solutions = enumerate_solutions(rep)?;
    Ok(Solved { integrand: integrand.clone(), representations, chosen, solutions })
}

/// Value obtained from a representation other than the chosen one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternativeValue {
    pub integrand: usize,
    pub representation: usize,
    pub index: usize,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Why each discarded solution was discarded.
    pub null_reasons: Vec<String>,
    pub alternatives: Vec<AlternativeValue>,
    /// Hypergeometric form of each one-index contributing solution.
    pub hypergeometric: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrandEvaluation<T> {
    pub solved: Solved,
    pub solutions: Vec<SolutionValue<T>>,
    pub value: T,
    pub terms_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub integrands: Vec<IntegrandEvaluation<T>>,
    pub value: T,
    pub terms_used: usize,
    pub diagnostics: Diagnostics,
}

/// Fails on the first parameter or constant of `integrands` without a binding.
pub fn check_bindings(integrands: &[Integrand], bindings: &Bindings) -> Result<(), BindingError> {
    for i in integrands {
        for p in i.params() {
            bindings.param(&p)?;
        }
        for c in i.sym_consts() {
            bindings.constant(&c)?;
        }
    }
    Ok(())
}

fn discard_reason(k: usize, sol: &SeriesSolution) -> Option<String> {
    let what = match sol.classification.as_ref()? {
        Classification::Null => "null series".to_string(),
        Classification::Divergent { reason } => format!("divergent: {reason}"),
        _ => return None,
    };
    let free: Vec<String> = sol.free_indices.iter().map(ToString::to_string).collect();
    Some(format!("integrand {k}, free [{}]: {what}", free.join(", ")))
}

/// Classifies every solution of every integrand. Used to report the
/// classification even when evaluation fails.
pub fn classify_all(solved: &[Solved], bindings: &Bindings, mode: PochMode) -> Result<Vec<Vec<SeriesSolution>>, Error> {
    solved
        .iter()
        .map(|s| {
            s.solutions
                .iter()
                .map(|sol| {
                    let mut sol = sol.clone();
                    if sol.classification.is_none() {
                        sol.classification = Some(classify(&sol, bindings, mode)?);
                    }
                    Ok(sol)
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect()
}

fn representation_value<T: Scalar>(rep: &BracketSeries, bindings: &Bindings, opts: &EvalOptions) -> Result<T, Error> {
    let sols = enumerate_solutions(rep)?;
    Ok(combine::<T>(&sols, bindings, T::lit(opts.tol), opts.max_terms, opts.mode)?.value)
}

/// Evaluates `Σ ∫₀^∞ integrand` with the method of brackets.
pub fn evaluate<T: Scalar>(
    integrands: &[Integrand],
    bindings: &Bindings,
    opts: &EvalOptions,
) -> Result<Evaluation<T>, Error> {
    check_bindings(integrands, bindings)?;
    let mut diagnostics = Diagnostics::default();
    let mut out = Vec::with_capacity(integrands.len());
    let mut total = crate::numeric::NeumaierSum::new();
    let mut terms_used = 0;
    for (k, integrand) in integrands.iter().enumerate() {
        let solved = solve(integrand)?;
        let classified = classify_all(std::slice::from_ref(&solved), bindings, opts.mode)?.remove(0);
        diagnostics.null_reasons.extend(classified.iter().filter_map(|s| discard_reason(k, s)));
        let combined = combine::<T>(&classified, bindings, T::lit(opts.tol), opts.max_terms, opts.mode)?;
        for sv in &combined.solutions {
            if sv.sum.is_some() {
                if let Some(h) = to_hypergeometric(&sv.solution) {
                    diagnostics
                        .hypergeometric
                        .push(format!("integrand {k}: weight {} * term(0) * {h}", fmt_rational(&sv.solution.weight)));
                }
            }
        }
        for (r, rep) in solved.representations.iter().enumerate() {
            if r == solved.chosen {
                continue;
            }
            let index = rep.indices.len().saturating_sub(rep.brackets.len());
            let (value, error) = match representation_value::<T>(rep, bindings, opts) {
                Ok(v) => (v.to_f64(), None),
                Err(e) => (None, Some(e.to_string())),
            };
            diagnostics.alternatives.push(AlternativeValue { integrand: k, representation: r, index, value, error });
        }
        total.add(combined.value);
        terms_used += combined.terms_used;
        out.push(IntegrandEvaluation {
            solved,
            value: combined.value,
            terms_used: combined.terms_used,
            solutions: combined.solutions,
        });
    }
    Ok(Evaluation { integrands: out, value: total.value(), terms_used, diagnostics })
}

/// Parses, validates and evaluates `text`.
pub fn evaluate_str<T: Scalar>(text: &str, bindings: &Bindings, opts: &EvalOptions) -> Result<Evaluation<T>, Error> {
    evaluate(&crate::parser::parse_integrands(text)?, bindings, opts)
}

fn records<T: Scalar>(eval: &Evaluation<T>) -> Vec<SolutionRecord> {
    eval.integrands
        .iter()
        .enumerate()
        .flat_map(|(k, ie)| {
            ie.solutions.iter().map(move |sv| SolutionRecord {
                integrand: k,
                free_indices: sv.solution.free_indices.iter().map(ToString::to_string).collect(),
                substitutions: sv.solution.substitutions.iter().map(|(v, e)| (v.to_string(), e.to_string())).collect(),
                weight: fmt_rational(&sv.solution.weight),
                classification: sv.solution.classification.clone(),
                value: sv.sum.as_ref().and_then(|s| s.value.to_f64()),
                terms_used: sv.sum.as_ref().map_or(0, |s| s.terms_used),
            })
        })
        .collect()
}

/// Runs the engine and the quadrature oracle and compares them. Engine and
/// oracle failures become a failed report with reasons; binding and input
/// errors are returned as errors.
pub fn verify<T: Scalar>(
    integrands: &[Integrand],
    bindings: &Bindings,
    tol: T,
    opts: &EvalOptions,
) -> Result<EvaluationReport<T>, Error> {
    check_bindings(integrands, bindings)?;
    let mut reasons = Vec::new();
    let (engine_value, terms_used, log) = match evaluate::<T>(integrands, bindings, opts) {
        Ok(e) => (Some(e.value), e.terms_used, records(&e)),
        Err(e) if e.is_input_error() => return Err(e),
        Err(e) => {
            reasons.push(format!("engine: {e}"));
            (None, 0, Vec::new())
        }
    };
    let oracle_tol = tol.min(T::lit(1e-8)).max(T::epsilon() * T::lit(1e3));
    let oracle_value = match quadrature_oracle(integrands, bindings, oracle_tol) {
        Ok(o) => Some(o.value),
        Err(e) => {
            reasons.push(format!("oracle: {e}"));
            None
        }
    };
    Ok(EvaluationReport::judge(engine_value, oracle_value, tol, terms_used, log, reasons))
}
