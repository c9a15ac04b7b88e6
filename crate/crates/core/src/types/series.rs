use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use super::affine::AffineForm;
use super::gamma_product::GammaProduct;
use super::index::IndexVar;
use crate::exact::fmt_rational;

/// Formal power series `Σ term(n) · x^{x_exponent(n)}` over its indices,
/// possibly carrying brackets produced by multinomial expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedSeries {
    pub indices: Vec<IndexVar>,
    pub term: GammaProduct,
    pub x_exponent: AffineForm,
    pub pending_brackets: Vec<AffineForm>,
}

impl IndexedSeries {
    /// The series with a single term `1 · x⁰`.
    pub fn unit() -> Self {
        Self {
            indices: Vec::new(),
            term: GammaProduct::one(),
            x_exponent: AffineForm::zero(),
            pending_brackets: Vec::new(),
        }
    }
}

/// Multi-index bracket series `Σ term(n) ⟨L₁⟩ ⋯ ⟨L_b⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketSeries {
    pub indices: Vec<IndexVar>,
    pub term: GammaProduct,
    pub brackets: Vec<AffineForm>,
}

impl BracketSeries {
    /// Number of sums minus number of brackets; negative for malformed input.
    pub fn raw_index(&self) -> i64 {
        self.indices.len() as i64 - self.brackets.len() as i64
    }

    /// Consistently renames the indices and reorders the index list.
    pub fn relabel(&self, map: &BTreeMap<IndexVar, IndexVar>, order: &[IndexVar]) -> Self {
        Self {
            indices: order.to_vec(),
            term: self.term.relabel(map),
            brackets: self.brackets.iter().map(|b| b.relabel(map)).collect(),
        }
    }

    /// Indices actually referenced by the term or a bracket.
    pub fn referenced_indices(&self) -> BTreeSet<IndexVar> {
        let mut out = self.term.indices();
        for b in &self.brackets {
            b.collect_indices(&mut out);
        }
        out
    }
}

impl fmt::Display for BracketSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        write!(f, "sum[{}] {}", idx.join(", "), self.term)?;
        for b in &self.brackets {
            write!(f, " <{b}>")?;
        }
        Ok(())
    }
}

/// Outcome of classifying a series solution at fixed bindings.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// Every term vanishes.
    Null,
    /// Terms blow up or grow; the solution is discarded.
    Divergent { reason: String },
    /// Terms decay; `ratio` is the empirical asymptotic term ratio.
    Convergent { ratio: f64 },
    /// No free indices remain: the solution is a single value.
    FiniteValue,
}

impl Classification {
    pub fn contributes(&self) -> bool {
        matches!(self, Self::Convergent { .. } | Self::FiniteValue)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Null => "null",
            Self::Divergent { .. } => "divergent",
            Self::Convergent { .. } => "convergent",
            Self::FiniteValue => "finite_value",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Null => f.write_str("null"),
            Self::Divergent { reason } => write!(f, "divergent ({reason})"),
            Self::Convergent { ratio } => write!(f, "convergent (ratio ~ {ratio:.6})"),
            Self::FiniteValue => f.write_str("finite value"),
        }
    }
}

/// A series in the free indices obtained by solving the vanishing conditions
/// of all brackets for one subset of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub free_indices: Vec<IndexVar>,
    pub eliminated: Vec<IndexVar>,
    pub term: GammaProduct,
    /// `1/|det A|` for the eliminated block.
    pub weight: BigRational,
    pub substitutions: BTreeMap<IndexVar, AffineForm>,
    /// `None` until classified at concrete bindings, except that solutions
    /// without free indices are born `FiniteValue`.
    pub classification: Option<Classification>,
}

impl fmt::Display for SeriesSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: Vec<String> = self.free_indices.iter().map(ToString::to_string).collect();
        let subs: Vec<String> = self.substitutions.iter().map(|(v, e)| format!("{v} = {e}")).collect();
        write!(
            f,
            "free [{}]; {}; weight {}; term {}",
            free.join(", "),
            subs.join(", "),
            fmt_rational(&self.weight),
            self.term
        )?;
        match &self.classification {
            Some(c) => write!(f, "; {c}"),
            None => f.write_str("; unclassified"),
        }
    }
}
