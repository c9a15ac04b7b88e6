use serde::Serialize;
use thiserror::Error;

use crate::engine::EngineError;
use crate::expansion::ExpansionError;
use crate::numeric::NumericError;
use crate::parser::ParseError;
use crate::types::BindingError;

/// Any failure of the end-to-end pipeline.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Binding(#[from] BindingError),
    #[error(transparent)]
    Engine(EngineError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

impl From<EngineError> for Error {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Binding(b) => Error::Binding(b),
            EngineError::Numeric(NumericError::Binding(b)) => Error::Binding(b),
            EngineError::Numeric(n) => Error::Numeric(n),
            other => Error::Engine(other),
        }
    }
}

impl Error {
    /// True for problems with the input rather than with evaluation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Expansion(_) | Error::Binding(_))
            || matches!(self, Error::Engine(EngineError::NegativeIndex { .. } | EngineError::MissingIndicator(_)))
    }
}
