//! Bracket elimination, classification and combination of series solutions.

mod classify;
mod combine;
mod hypergeometric;
pub mod linear;
mod solutions;

use serde::Serialize;
use thiserror::Error;

use crate::numeric::NumericError;
use crate::types::{BindingError, IndexVar};

pub use classify::{classify, classify_with, ClassifyOptions};
pub use combine::{combine, CombinedValue, SolutionValue};
pub use hypergeometric::{to_hypergeometric, HyperArgument, Hypergeometric};
pub use solutions::{choose_representation, enumerate_solutions, representation_index};

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum EngineError {
    #[error("representation has {brackets} brackets but only {sums} sums")]
    NegativeIndex { sums: usize, brackets: usize },
    #[error("every choice of eliminated indices gives a singular system")]
    NoSolutions,
    #[error("no representations to choose from")]
    EmptyList,
    #[error("eliminated index {0} carries no indicator")]
    MissingIndicator(IndexVar),
    #[error("no convergent series solution at these parameter values")]
    NoConvergentSolution,
    #[error(transparent)]
    Binding(#[from] BindingError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}
