//! Floating-point kernels: gamma, Bessel J, quadrature, series summation,
//! the quadrature oracle and verification reports.

pub mod bessel;
mod gamma;
mod oracle;
pub mod quadrature;
mod report;
mod summation;

use serde::Serialize;
use thiserror::Error;

use crate::types::BindingError;

pub use bessel::bessel_j;
pub use gamma::{gamma_real, sin_pi};
pub use oracle::{integrand_value, quadrature_oracle, OracleEstimate};
pub use report::{EvaluationReport, SolutionRecord, Verdict};
pub use summation::{sum_series, NeumaierSum, SeriesSum};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum NumericError {
    #[error("gamma function pole at {0}")]
    PoleAt(f64),
    #[error("argument is not a number")]
    NotANumber,
    #[error("series did not converge within {max_terms} terms (last shell magnitude {last_term:e})")]
    DidNotConverge { max_terms: usize, last_term: f64 },
    #[error("divergent term at {point}")]
    DivergentTermEncountered { point: String },
    #[error("quadrature oracle failed: {0}")]
    OracleFailedToConverge(String),
    #[error(transparent)]
    Binding(#[from] BindingError),
}
