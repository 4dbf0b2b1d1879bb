//! Exact rational values and their canonical `num/den` text form.
//!
//! Every sum, weight and report value in this crate is a [`Rational`]; nothing
//! is ever rounded to floating point. The `num/den` rendering always includes
//! the denominator (`"3/4"`, `"108/1"`, `"0/1"`) so that report files are
//! unambiguous and byte-stable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Renders a rational as `num/den` in lowest terms with a positive denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer. The denominator must be nonzero.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::ParseRational(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n: BigInt = num.trim().parse().map_err(|_| err())?;
    let d: BigInt = den.trim().parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}
