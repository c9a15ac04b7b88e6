use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use super::index::{IndexVar, Param, SymbolicConst};

/// Assignment of nonnegative integers to summation indices.
pub type Point = BTreeMap<IndexVar, u64>;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum BindingError {
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("index {0} has no assigned value")]
    UnassignedIndex(IndexVar),
    #[error("invalid value for `{name}`: {reason}")]
    InvalidValue { name: String, reason: String },
}

/// Numeric values for scale parameters and exact values for symbolic
/// constants. Lookups of missing names are errors; nothing defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    params: BTreeMap<Param, f64>,
    consts: BTreeMap<SymbolicConst, BigRational>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds a scale parameter. Values must be finite and nonnegative; zero is
    /// accepted as the degenerate scale with `0^0 = 1`.
    pub fn bind_param(&mut self, name: &str, value: f64) -> Result<(), BindingError> {
        if !value.is_finite() || value < 0.0 {
            return Err(BindingError::InvalidValue {
                name: name.to_string(),
                reason: format!("scale parameters must be finite and nonnegative, got {value}"),
            });
        }
        self.params.insert(Param::new(name), value);
        Ok(())
    }

    pub fn bind_const(&mut self, name: &str, value: BigRational) {
        self.consts.insert(SymbolicConst::new(name), value);
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.bind_param(name, value).expect("valid parameter value");
        self
    }

    pub fn with_const(mut self, name: &str, value: BigRational) -> Self {
        self.bind_const(name, value);
        self
    }

    pub fn param(&self, p: &Param) -> Result<f64, BindingError> {
        self.params.get(p).copied().ok_or_else(|| BindingError::UnboundParameter(p.name().to_string()))
    }

    pub fn constant(&self, c: &SymbolicConst) -> Result<&BigRational, BindingError> {
        self.consts.get(c).ok_or_else(|| BindingError::UnboundParameter(c.name().to_string()))
    }

    /// Floating value of a constant.
    pub fn constant_f64(&self, c: &SymbolicConst) -> Result<f64, BindingError> {
        Ok(self.constant(c)?.to_f64().unwrap_or(f64::NAN))
    }

    pub fn params(&self) -> impl Iterator<Item = (&Param, f64)> {
        self.params.iter().map(|(p, v)| (p, *v))
    }

    pub fn consts(&self) -> impl Iterator<Item = (&SymbolicConst, &BigRational)> {
        self.consts.iter()
    }
}
