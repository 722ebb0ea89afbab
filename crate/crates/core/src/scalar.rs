//! Number types used throughout the crate.
//!
//! Every linear-algebra routine is generic over [`Scalar`], which has two
//! implementations: exact [`Rational`] (arbitrary precision) for decisions
//! and certificates, and `f64` for iterative work such as weight fitting.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default tolerance for numeric-mode equality checks.
pub const NUMERIC_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    /// True for arbitrary-precision types, where tolerances are ignored.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;

    /// Three-way sign with a tolerance band around zero (ignored when exact).
    fn sign(&self, tol: f64) -> Ordering;

    /// Equality up to `tol` (absolute, scaled by magnitude) in numeric mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Whether this value can serve as an elimination pivot.
    fn is_pivot_candidate(&self) -> bool;

    /// JSON rendering: rationals as `"p/q"` strings, floats as numbers.
    fn to_json(&self) -> serde_json::Value;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn is_positive_tol(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Greater
    }

    fn is_nonnegative_tol(&self, tol: f64) -> bool {
        self.sign(tol) != Ordering::Less
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn sign(&self, _tol: f64) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn is_pivot_candidate(&self) -> bool {
        !self.is_zero()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn sign(&self, tol: f64) -> Ordering {
        if self.abs() <= tol {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol * (1.0 + self.abs().max(other.abs()))
    }

    fn is_pivot_candidate(&self) -> bool {
        self.abs() > 1e-14
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// Parse `p/q`, an integer, or a decimal literal such as `-1.25e-3` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parameter(format!("not a rational literal: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parameter(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits })
        .map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Render a rational as `p/q` (integers render without a denominator).
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Serde adapter rendering an optional rational as `"p/q"` or null.
pub fn serialize_opt_rational<Ser: serde::Serializer>(
    value: &Option<Rational>,
    ser: Ser,
) -> std::result::Result<Ser::Ok, Ser::Error> {
    match value {
        Some(r) => ser.serialize_str(&format_rational(r)),
        None => ser.serialize_none(),
    }
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents).
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let negative = x < 0.0;
    let mut rem = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rem - a;
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        -r
    } else {
        r
    }
}

/// Exact conversion of any scalar vector to floats.
pub fn to_f64_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Compare two vectors entrywise (exactly, or within `tol` for floats).
pub fn vec_approx_eq<S: Scalar>(a: &[S], b: &[S], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol))
}

pub fn json_vec<S: Scalar>(v: &[S]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(Scalar::to_json).collect())
}

pub fn sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().fold(S::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_rational("2.5e1").unwrap(), q(25, 1));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1e-2").unwrap(), q(1, 100));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(2.0 / 3.0, 1000), q(2, 3));
        assert_eq!(rationalize(-0.75, 1000), q(-3, 4));
        assert_eq!(rationalize(0.0, 10), q(0, 1));
    }

    #[test]
    fn signs_respect_tolerance_only_in_float_mode() {
        assert_eq!(1e-12f64.sign(1e-9), Ordering::Equal);
        assert_eq!(q(1, 1_000_000_000_000).sign(1e-9), Ordering::Greater);
    }
}
