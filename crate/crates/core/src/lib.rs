//! Evaluation of definite integrals `∫₀^∞ f(x) dx` by the method of brackets.
//!
//! An integrand written in a small DSL is parsed ([`parser`]), each factor is
//! expanded into a power series and the product turned into a bracket series
//! ([`expansion`]). The [`engine`] eliminates brackets by solving their
//! vanishing conditions exactly, classifies the resulting series and sums the
//! convergent ones. Gamma products are evaluated at lattice points through a
//! shared-ε limit ([`pochhammer`]), which resolves Pochhammer symbols with
//! negative integer base and negative index. [`numeric`] holds the floating
//! point kernels and an independent quadrature oracle.
//!
//! ```
//! use bracketeer::{evaluate_str, Bindings, EvalOptions};
//!
//! let b = Bindings::new().with_param("a", 1.0).with_param("b", 2.0);
//! let v = evaluate_str::<f64>("besselj(0, a*x) * sin(b*x)", &b, &EvalOptions::default())
//!     .unwrap()
//!     .value;
//! assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-12);
//! ```

pub mod engine;
mod error;
pub mod exact;
pub mod expansion;
pub mod expr;
pub mod lattice;
pub mod numeric;
pub mod parser;
pub mod pipeline;
pub mod pochhammer;
pub mod scalar;
pub mod types;

pub use error::Error;
pub use expr::{Atom, Expr, Integrand};
pub use parser::{parse, parse_integrands, validate, ParseError, SourceSpan};
pub use pipeline::{evaluate, evaluate_str, solve, verify, Diagnostics, EvalOptions, Evaluation, Solved};
pub use pochhammer::{PochMode, TermValue};
pub use scalar::Scalar;
pub use types::{
    AffineForm, BindingError, Bindings, BracketSeries, Classification, GammaProduct, IndexVar, Param, SeriesSolution,
    SymbolicConst,
};

/// Exact coefficients of the symbolic layer.
pub type Rational = num_rational::BigRational;
/// Default floating-point type of the numeric layer.
pub type Real = f64;
pub type TermValue64 = pochhammer::TermValue<f64>;
pub type Evaluation64 = pipeline::Evaluation<f64>;
pub type EvaluationReport64 = numeric::EvaluationReport<f64>;
pub type SeriesSum64 = numeric::SeriesSum<f64>;
