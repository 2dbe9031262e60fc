//! Exact decimal parsing and fixed-point rendering for rational values.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimalError(pub String);

impl fmt::Display for DecimalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal {:?}", self.0)
    }
}

impl std::error::Error for DecimalError {}

pub fn pow10(exp: u32) -> BigInt {
    BigInt::from(10u8).pow(exp)
}

pub fn pow10_u(exp: u32) -> BigUint {
    BigUint::from(10u8).pow(exp)
}

/// Parses a base-10 non-negative integer with no sign, exponent or separators.
pub fn parse_uint(s: &str) -> Result<BigUint, DecimalError> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DecimalError(s.to_string()));
    }
    t.parse::<BigUint>().map_err(|_| DecimalError(s.to_string()))
}

/// Parses `[-+]digits[.digits]` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational, DecimalError> {
    let t = s.trim();
    let err = || DecimalError(s.to_string());
    let (negative, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let scale = u32::try_from(frac_part.len()).map_err(|_| err())?;
    let value = BigRational::new(numer, pow10(scale));
    Ok(if negative { -value } else { value })
}

/// Renders `value` with exactly `dp` fractional digits, rounding half away from zero.
pub fn format_fixed(value: &BigRational, dp: u32) -> String {
    let scale = pow10(dp);
    let scaled = value.abs() * BigRational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2u8;
    let rounded = if &twice >= scaled.denom() { q + 1u8 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if value.is_negative() && !rounded_is_zero(&int_part, &frac_part) { "-" } else { "" };
    if dp == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = dp as usize)
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

/// Renders an exact rational as a minimal decimal when it terminates, else with 18 digits.
pub fn format_rational(value: &BigRational) -> String {
    let mut den = value.denom().clone();
    for p in [2u8, 5u8] {
        let p = BigInt::from(p);
        while (&den % &p).is_zero() {
            den /= &p;
        }
    }
    if !den.is_one() {
        return format_fixed(value, 18);
    }
    let mut dp = 0u32;
    while !(value * BigRational::from_integer(pow10(dp))).is_integer() {
        dp += 1;
    }
    format_fixed(value, dp)
}

pub fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn to_signed(u: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, u.clone())
}

/// Floor of a non-negative rational as an unsigned integer; negative values clamp to zero.
pub fn floor_u(value: &BigRational) -> BigUint {
    value.floor().to_integer().to_biguint().unwrap_or_default()
}

pub fn ceil_u(value: &BigRational) -> BigUint {
    value.ceil().to_integer().to_biguint().unwrap_or_default()
}
