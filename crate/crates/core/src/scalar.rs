//! Scalar abstraction shared by the exact and floating-point pipelines.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Field element usable by every matrix and solver routine in this crate.
///
/// Implemented for `f32`, `f64` and [`Rational`]. The exact basis data is always built
/// over [`Rational`] and converted once via [`Scalar::from_rational`].
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_rational(r: &Rational) -> Self;

    /// Lossy view used for norms, diagnostics and step-size control.
    fn as_f64(&self) -> f64;

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    /// Division that reports a zero divisor instead of panicking or producing inf.
    fn checked_quotient(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.clone() / other.clone())
        }
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r) as f32
    }

    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Nearest `f64` to `r` (correctly rounded by num-rational).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out of range: saturate with the right sign.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational `num/den`. Panics on a zero denominator; use for literals only.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| Error::Argument(format!("{x} is not a finite number")))
}

pub fn rational_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses a literal such as `-3`, `7/12`, or `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Argument(format!("cannot parse '{s}' as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let r = ratio(6, -8);
        assert_eq!(r, ratio(-3, 4));
        assert!(r.denom() > &BigInt::from(0));
    }

    #[test]
    fn checked_division_by_zero() {
        assert_eq!(ratio(1, 2).checked_quotient(&ratio(0, 1)), Err(Error::DivisionByZero));
        assert_eq!(1.0f64.checked_quotient(&0.0), Err(Error::DivisionByZero));
        assert_eq!(ratio(1, 2).checked_quotient(&ratio(1, 4)), Ok(ratio(2, 1)));
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("7/12").unwrap(), ratio(7, 12));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational(" 42 ").unwrap(), ratio(42, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn conversions() {
        assert_eq!(f64::from_rational(&ratio(1, 4)), 0.25);
        assert_eq!(ratio(1, 3).as_f64(), 1.0 / 3.0);
        assert_eq!(rational_from_f64(0.1).unwrap().as_f64(), 0.1);
        assert!(rational_from_f64(f64::NAN).is_err());
    }
}
