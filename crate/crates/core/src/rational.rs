//! Arbitrary-precision rational scalars.
//!
//! `BigRational` already keeps values in lowest terms with a positive
//! denominator and a canonical zero of 0/1, which is exactly the scalar
//! contract the rest of the crate relies on.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational n/d. Panics if d == 0.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "123" or "123/456" (no sign; signs are handled by callers).
pub fn parse_unsigned_rational(s: &str) -> Option<Rational> {
    fn digits(part: &str) -> Option<BigInt> {
        // BigInt's FromStr tolerates a sign; this context must not.
        (!part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()))
            .then(|| part.parse().ok())
            .flatten()
    }
    let mut parts = s.splitn(2, '/');
    let numer = digits(parts.next()?)?;
    match parts.next() {
        None => Some(Rational::from_integer(numer)),
        Some(d) => {
            let denom = digits(d)?;
            if denom.is_zero() {
                None
            } else {
                Some(Rational::new(numer, denom))
            }
        }
    }
}

/// Parses "123", "-123", "123/456" or "-123/456".
pub fn parse_signed_rational(s: &str) -> Option<Rational> {
    match s.strip_prefix('-') {
        Some(rest) => parse_unsigned_rational(rest).map(|r| -r),
        None => parse_unsigned_rational(s),
    }
}

/// Exact k-th root over Q, if one exists. For even k the input must be
/// non-negative and the non-negative root is returned.
pub fn rational_nth_root(x: &Rational, k: u32) -> Option<Rational> {
    assert!(k >= 1, "root index must be positive");
    if k == 1 {
        return Some(x.clone());
    }
    if x.is_zero() {
        return Some(Rational::zero());
    }
    if k % 2 == 0 && x.is_negative() {
        return None;
    }
    let numer = int_nth_root(x.numer(), k)?;
    let denom = int_nth_root(x.denom(), k)?;
    Some(Rational::new(numer, denom))
}

/// Exact integer k-th root, honoring sign for odd k.
fn int_nth_root(x: &BigInt, k: u32) -> Option<BigInt> {
    let negative = x.is_negative();
    if negative && k % 2 == 0 {
        return None;
    }
    let mag = x.abs();
    let root = mag.nth_root(k);
    if num_traits::pow::pow(root.clone(), k as usize) != mag {
        return None;
    }
    Some(if negative { -root } else { root })
}

/// gcd of two non-negative machine integers (degree bookkeeping).
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
