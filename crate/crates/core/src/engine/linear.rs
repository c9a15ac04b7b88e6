//! Exact dense linear algebra over the rationals.

#![allow(clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::types::AffineForm;

/// Determinant by Gaussian elimination over `BigRational`.
pub fn determinant(matrix: &[Vec<BigRational>]) -> BigRational {
    let n = matrix.len();
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Solves `A y = rhs` where the right-hand side entries are affine forms.
/// Returns `None` when `A` is singular.
pub fn solve_affine(matrix: &[Vec<BigRational>], rhs: &[AffineForm]) -> Option<Vec<AffineForm>> {
    let n = matrix.len();
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut b: Vec<AffineForm> = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        b.swap(pivot, col);
        let inv = BigRational::one() / &a[col][col];
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = b[col].scale(&inv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
            b[r] = &b[r] - &b[col].scale(&f);
        }
    }
    Some(b)
}
