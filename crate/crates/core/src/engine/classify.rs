use num_traits::Signed;

use super::EngineError;
use crate::exact::as_i64;
use crate::lattice;
use crate::pochhammer::{regularize, PochMode, Regularized};
use crate::types::{Bindings, Classification, Point, SeriesSolution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub mode: PochMode,
    /// Lattice points that must vanish before a structural null is accepted.
    pub null_points: usize,
    /// Ratio above which persistent growth means divergence.
    pub ratio_threshold: f64,
    /// Trailing ratios that must all exceed the threshold.
    pub persistence: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { mode: PochMode::Regularized, null_points: 50, ratio_threshold: 0.999, persistence: 10 }
    }
}

fn shells_for(d: usize) -> u64 {
    match d {
        1 => 50,
        2 => 30,
        _ => 12,
    }
}

/// A reciprocal gamma whose argument is a non-positive integer at every
/// lattice point of the free indices.
fn structural_null(sol: &SeriesSolution, bindings: &Bindings) -> Result<bool, EngineError> {
    for (arg, sigma) in sol.term.gamma_factors() {
        if sigma >= 0 {
            continue;
        }
        let bound = arg.bind_consts(bindings)?;
        let const_ok = as_i64(bound.constant_part()).is_some_and(|k| k <= 0);
        let coeffs_ok = bound.index_terms().all(|(_, q)| q.is_integer() && !q.is_positive());
        if const_ok && coeffs_ok {
            return Ok(true);
        }
    }
    Ok(false)
}

fn magnitude(r: &Regularized<f64>) -> Option<f64> {
    match r {
        Regularized::Zero => Some(0.0),
        Regularized::Divergent => None,
        Regularized::Finite(v) => Some(v.value().abs()),
    }
}

/// Classifies with default options in the given Pochhammer mode.
pub fn classify(sol: &SeriesSolution, bindings: &Bindings, mode: PochMode) -> Result<Classification, EngineError> {
    classify_with(sol, bindings, ClassifyOptions { mode, ..ClassifyOptions::default() })
}

/// Decides whether a solution is null, divergent, convergent, or a single
/// finite value, by inspecting regularized terms at the given bindings.
pub fn classify_with(
    sol: &SeriesSolution,
    bindings: &Bindings,
    opts: ClassifyOptions,
) -> Result<Classification, EngineError> {
    let d = sol.free_indices.len();
    if d == 0 {
        return Ok(match regularize::<f64>(&sol.term, &Point::new(), bindings, opts.mode)? {
            Regularized::Divergent => Classification::Divergent { reason: "unbalanced gamma pole".into() },
            _ => Classification::FiniteValue,
        });
    }

    if structural_null(sol, bindings)? {
        let mut all_zero = true;
        let mut seen = 0usize;
        'outer: for s in 0u64.. {
            for coords in lattice::shell(d, s) {
                let p = lattice::point(&sol.free_indices, &coords);
                if !matches!(regularize::<f64>(&sol.term, &p, bindings, opts.mode)?, Regularized::Zero) {
                    all_zero = false;
                    break 'outer;
                }
                seen += 1;
                if seen >= opts.null_points {
                    break 'outer;
                }
            }
        }
        if all_zero {
            return Ok(Classification::Null);
        }
    }

    // Largest |term| per shell of total degree.
    let mut maxima = Vec::new();
    for s in 0..shells_for(d) {
        let mut m = 0.0f64;
        for coords in lattice::shell(d, s) {
            let p = lattice::point(&sol.free_indices, &coords);
            let r = regularize::<f64>(&sol.term, &p, bindings, opts.mode)?;
            match magnitude(&r) {
                Some(v) if v.is_finite() => m = m.max(v),
                _ => return Ok(Classification::Divergent { reason: format!("infinite term at {coords:?}") }),
            }
        }
        maxima.push(m);
    }

    // Per-step ratios between consecutive nonzero shells, so that series
    // with structurally vanishing shells are judged on their live terms.
    let live: Vec<(usize, f64)> = maxima.iter().copied().enumerate().filter(|&(_, m)| m > 0.0).collect();
    let ratios: Vec<f64> = live.windows(2).map(|w| (w[1].1 / w[0].1).powf(1.0 / (w[1].0 - w[0].0) as f64)).collect();
    let tail = &ratios[ratios.len().saturating_sub(opts.persistence)..];
    if !tail.is_empty() && tail.iter().all(|&r| r > opts.ratio_threshold) {
        return Ok(Classification::Divergent {
            reason: format!("term ratio ~ {:.6} does not fall below {}", tail[tail.len() - 1], opts.ratio_threshold),
        });
    }
    Ok(Classification::Convergent { ratio: tail.last().copied().unwrap_or(0.0) })
}
