//! Exact arbitrary-precision integers and rationals.
//!
//! Word registers hold unbounded integers, real registers hold rationals in
//! canonical form (reduced, positive denominator). The textual form used
//! everywhere in the toolkit is `num/den`, with the denominator omitted when
//! it is 1 (`-3/4`, `17`).

use num_traits::{Signed, Zero};
use thiserror::Error;

pub use num_bigint::BigInt;

/// Canonical rational: reduced, denominator strictly positive.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
}

/// Builds `num/den` in canonical form. Fails on a zero denominator.
pub fn normalize_rational(num: BigInt, den: BigInt) -> Result<Rational, ExactError> {
    if den.is_zero() {
        return Err(ExactError::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

/// The unique integer `i` with `i <= x < i+1` (floor toward minus infinity).
pub fn floor_rational(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Sign of a rational: -1, 0 or +1.
pub fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text form: `num/den`, denominator omitted when 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the canonical text form (optional leading `-`, optional `/den`).
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let s = text.trim();
    let bad = || ExactError::MalformedRational(text.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let num: BigInt = n.trim().parse().map_err(|_| bad())?;
            let den: BigInt = d.trim().parse().map_err(|_| bad())?;
            normalize_rational(num, den)
        }
        None => {
            let num: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(num))
        }
    }
}
