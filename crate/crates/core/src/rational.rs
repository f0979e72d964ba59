//! Exact rational numbers.
//!
//! Every quantity in the crate (valuations, bids, welfare, ratios, segment
//! endpoints) is a [`Rational`]. Text form is `p/q` or a bare integer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p/q`, `-p/q` or an integer. Whitespace around the parts is
/// tolerated; a zero denominator is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let bad = |reason: &str| Error::InvalidRational {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(bad("empty"));
    }
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Midpoint of two rationals.
pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

pub fn is_non_negative(r: &Rational) -> bool {
    !r.is_negative()
}
