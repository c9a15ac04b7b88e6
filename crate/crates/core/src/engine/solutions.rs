use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linear::{determinant, solve_affine};
use super::EngineError;
use crate::types::{BracketSeries, Classification, IndexVar, SeriesSolution};

/// Number of sums minus number of brackets.
pub fn representation_index(bs: &BracketSeries) -> Result<usize, EngineError> {
    let (sums, brackets) = (bs.indices.len(), bs.brackets.len());
    if brackets > sums {
        return Err(EngineError::NegativeIndex { sums, brackets });
    }
    Ok(sums - brackets)
}

/// Minimal index first, then fewest indices, then earliest position.
pub fn choose_representation(reps: &[BracketSeries]) -> Result<(usize, &BracketSeries), EngineError> {
    let mut best: Option<((usize, usize), usize)> = None;
    for (i, r) in reps.iter().enumerate() {
        let key = (representation_index(r)?, r.indices.len());
        if best.is_none_or(|(k, _)| key < k) {
            best = Some((key, i));
        }
    }
    let (_, i) = best.ok_or(EngineError::EmptyList)?;
    Ok((i, &reps[i]))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// One solution per size-`b` subset of indices with a non-singular
/// coefficient block, subsets in lexicographic order of index position.
pub fn enumerate_solutions(bs: &BracketSeries) -> Result<Vec<SeriesSolution>, EngineError> {
    representation_index(bs)?;
    let b = bs.brackets.len();
    let mut out = Vec::new();
    for subset in combinations(bs.indices.len(), b) {
        let chosen: Vec<IndexVar> = subset.iter().map(|&i| bs.indices[i]).collect();
        let matrix: Vec<Vec<BigRational>> =
            bs.brackets.iter().map(|br| chosen.iter().map(|&v| br.index_coeff(v)).collect()).collect();
        let det = determinant(&matrix);
        if det.is_zero() {
            continue;
        }
        let rhs: Vec<_> =
            bs.brackets.iter().map(|br| -chosen.iter().fold(br.clone(), |f, &v| f.without_index(v))).collect();
        let values = solve_affine(&matrix, &rhs).ok_or(EngineError::NoSolutions)?;
        let substitutions: BTreeMap<IndexVar, _> = chosen.iter().copied().zip(values).collect();
        let mut term = bs.term.substitute(&substitutions);
        for (&v, value) in &substitutions {
            if !term.has_indicator(v) {
                return Err(EngineError::MissingIndicator(v));
            }
            term = term.without_indicator(v).with_gamma(-value.clone(), 1);
        }
        let free_indices: Vec<IndexVar> = bs.indices.iter().copied().filter(|v| !chosen.contains(v)).collect();
        let classification = free_indices.is_empty().then_some(Classification::FiniteValue);
        out.push(SeriesSolution {
            free_indices,
            eliminated: chosen,
            term,
            weight: BigRational::one() / det.abs(),
            substitutions,
            classification,
        });
    }
    if out.is_empty() {
        return Err(EngineError::NoSolutions);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::expansion::expand_integrand;
    use crate::parser::parse_integrands;
    use crate::types::{AffineForm, GammaProduct};

    fn reps(text: &str) -> Vec<BracketSeries> {
        expand_integrand(&parse_integrands(text).unwrap()[0]).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn indices_of_representations() {
        assert_eq!(representation_index(&reps("besselj(0,a*x)*sin(b*x)")[0]).unwrap(), 1);
        assert_eq!(representation_index(&reps("exp(-x)")[0]).unwrap(), 0);
        assert_eq!(representation_index(&reps("x^(s-1)*(1+x)^(-al)")[0]).unwrap(), 0);
        let mut bad = reps("exp(-x)")[0].clone();
        bad.brackets.push(AffineForm::integer(1));
        assert!(matches!(representation_index(&bad), Err(EngineError::NegativeIndex { .. })));
    }

    #[test]
    fn flagship_solutions() {
        let bs = &reps("besselj(0,a*x)*sin(b*x)")[0];
        let (m, n) = (bs.indices[0], bs.indices[1]);
        let sols = enumerate_solutions(bs).unwrap();
        assert_eq!(sols.len(), 2);
        // eliminating m first (lexicographic subsets)
        assert_eq!(sols[0].eliminated, vec![m]);
        assert_eq!(sols[0].substitutions[&m], AffineForm::index(n).scale(&int(-1)).with_constant(int(-1)));
        let by_n = &sols[1];
        assert_eq!(by_n.free_indices, vec![m]);
        assert_eq!(by_n.substitutions[&n], AffineForm::index(m).scale(&int(-1)).with_constant(int(-1)));
        assert_eq!(by_n.weight, rat(1, 2));
        assert!(by_n.term.gamma_factors().any(|(arg, e)| e == 1 && *arg == AffineForm::index(m).scale(&int(-1))));
        assert!(by_n.term.gamma_factors().any(|(arg, e)| e == -1 && *arg == AffineForm::index(m).scale(&int(-2))));
        assert!(!by_n.term.has_indicator(n) && by_n.term.has_indicator(m));
    }

    #[test]
    fn exponential_is_a_finite_value() {
        let sols = enumerate_solutions(&reps("exp(-x)")[0]).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].classification, Some(Classification::FiniteValue));
        // Γ(1)·1 after n* = -1
        assert_eq!(sols[0].term, GammaProduct::one());
    }

    #[test]
    fn singular_systems_are_skipped() {
        let n1 = IndexVar::new(1);
        let n2 = IndexVar::new(2);
        let term = GammaProduct::one().with_indicator(n1).with_indicator(n2);
        let bracket = AffineForm::index(n1) + AffineForm::index(n2);
        let bs = BracketSeries {
            indices: vec![n1, n2],
            term,
            brackets: vec![bracket.clone(), bracket.with_constant(int(1))],
        };
        assert_eq!(enumerate_solutions(&bs), Err(EngineError::NoSolutions));
    }

    #[test]
    fn tie_breaks() {
        let mut all = reps("x^(s-1)*(1+x)^(-al)");
        let (i, chosen) = choose_representation(&all).unwrap();
        assert_eq!(i, 1);
        assert_eq!(chosen.indices.len(), 1);
        all.swap(0, 1);
        assert_eq!(choose_representation(&all).unwrap().0, 0);
        let flag = reps("besselj(0,a*x)*sin(b*x)");
        let exp = reps("exp(-x)");
        let mixed = vec![flag[0].clone(), exp[0].clone()];
        assert_eq!(choose_representation(&mixed).unwrap().0, 1);
        assert_eq!(choose_representation(&[]), Err(EngineError::EmptyList));
    }
}
