//! Exact symbolic data model shared by the parser, expansion rules, bracket
//! engine and Pochhammer kernel.

mod affine;
mod bindings;
mod gamma_product;
mod index;
mod series;

pub use affine::AffineForm;
pub use bindings::{BindingError, Bindings, Point};
pub use gamma_product::GammaProduct;
pub use index::{IndexAllocator, IndexVar, Param, SymbolicConst};
pub use series::{BracketSeries, Classification, IndexedSeries, SeriesSolution};
