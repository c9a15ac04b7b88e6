//! Small exact-arithmetic helpers over arbitrary-precision rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u64) -> BigInt {
    product_range(1, n)
}

/// `lo * (lo+1) * ... * hi`, or 1 when the range is empty.
pub fn product_range(lo: u64, hi: u64) -> BigInt {
    if lo > hi {
        return BigInt::one();
    }
    if hi - lo < 16 {
        return (lo..=hi).fold(BigInt::one(), |acc, k| acc * k);
    }
    let mid = lo + (hi - lo) / 2;
    product_range(lo, mid) * product_range(mid + 1, hi)
}

/// `base^exp` for a signed integer exponent. Panics on `0^negative`.
pub fn pow_int(base: &BigRational, exp: i64) -> BigRational {
    let mag = exp.unsigned_abs();
    let numer = num_traits::pow(base.numer().clone(), mag as usize);
    let denom = num_traits::pow(base.denom().clone(), mag as usize);
    if exp >= 0 {
        BigRational::new(numer, denom)
    } else {
        BigRational::new(denom, numer)
    }
}

/// Returns `Some(n)` when `q` is an integer fitting in `i64`.
pub fn as_i64(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

/// Returns `Some(n)` when `q = n + 1/2` for an `i64` value `n`.
pub fn half_integer_floor(q: &BigRational) -> Option<i64> {
    if q.denom() == &BigInt::from(2) {
        let (fl, _) = q.numer().div_mod_floor(&BigInt::from(2));
        fl.to_i64()
    } else {
        None
    }
}

/// Parses `"3"`, `"-3/2"`, `"0.125"`, or `"1.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{whole}{frac}0").parse().ok()?;
    let mut value = BigRational::new(all, BigInt::from(10));
    let shift = exponent as i64 - frac.len() as i64;
    value *= pow_int(&int(10), shift);
    if negative {
        value = -value;
    }
    Some(value)
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn is_nonpositive_integer(q: &BigRational) -> bool {
    q.is_integer() && !q.is_positive()
}

/// Lowest common multiple of the denominators, useful for clearing fractions.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
