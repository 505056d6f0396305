//! Coefficient traits and exact rational helpers.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A field usable as polynomial coefficients.
///
/// Implemented for [`BigRational`] (exact) and for `f64`/`f32` (fast, inexact).
pub trait Coefficient:
    Clone + PartialEq + Debug + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// The small non-negative integer `k` as a coefficient.
    fn from_count(k: u64) -> Self;

    /// Best `f64` approximation.
    fn to_f64_lossy(&self) -> f64;
}

impl Coefficient for BigRational {
    fn from_count(k: u64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }

    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Coefficient for f64 {
    fn from_count(k: u64) -> Self {
        k as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Coefficient for f32 {
    fn from_count(k: u64) -> Self {
        k as f32
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

/// Exact binary-to-rational conversion. `None` for NaN and infinities.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Correctly rounded conversion to `f64`; saturates to +-inf on overflow.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None if r.is_negative() => f64::NEG_INFINITY,
        None => f64::INFINITY,
    }
}

/// Parses `"p/q"`, integers, and decimals with optional exponent (`"0.54"`, `"1e-3"`)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if negative { -value } else { value })
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
