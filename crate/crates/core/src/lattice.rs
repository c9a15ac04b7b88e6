//! Enumeration of nonnegative integer points by total degree.

use crate::types::{IndexVar, Point};

/// All points of `ℕ^d` with coordinate sum `s`, in lexicographic order.
pub fn shell(d: usize, s: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fill(d, s, &mut cur, &mut out);
    out
}

fn fill(d: usize, s: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if d == 0 {
        if s == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if d == 1 {
        cur.push(s);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for k in 0..=s {
        cur.push(k);
        fill(d - 1, s - k, cur, out);
        cur.pop();
    }
}

/// Binds `coords` to `indices` positionally.
pub fn point(indices: &[IndexVar], coords: &[u64]) -> Point {
    indices.iter().copied().zip(coords.iter().copied()).collect()
}

/// Number of points in the shell of degree `s` in dimension `d`.
pub fn shell_len(d: usize, s: u64) -> u64 {
    if d == 0 {
        return u64::from(s == 0);
    }
    // C(s + d - 1, d - 1)
    let k = (d - 1) as u64;
    (1..=k).fold(1u64, |acc, i| acc * (s + i) / i)
}
