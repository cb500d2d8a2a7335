//! Scalar abstraction shared by the exact and floating instantiations.
//!
//! Every verdict in this crate (membership certificates, witness
//! confirmations) is computed over [`Rational`]. `f64` only drives the
//! witness search loops.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// An ordered field element.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self;

    /// Parse a literal: `p/q`, an integer, or a decimal.
    fn parse_literal(s: &str) -> Result<Self>;

    /// Canonical text form. Rationals print as `p/q` (or bare `p`).
    fn canonical(&self) -> String;

    fn to_f64(&self) -> f64;

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for Rational {
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn canonical(&self) -> String {
        format_rational(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| parse_err("float", s))?;
            let q: f64 = q.trim().parse().map_err(|_| parse_err("float", s))?;
            return Ok(p / q);
        }
        t.parse().map_err(|_| parse_err("float", s))
    }

    fn canonical(&self) -> String {
        format!("{self:?}")
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

fn parse_err(what: &'static str, input: &str) -> Error {
    Error::Parse { what, input: input.to_string() }
}

/// `p/q` with `gcd(p, q) = 1` and `q > 0`; integers print bare.
pub fn format_rational(q: &Rational) -> String {
    // `Ratio` is normalized on construction, so the fields are canonical.
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, integer literals and decimal literals (optionally with
/// an exponent) into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(parse_err("rational", input));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::parse_bytes(p.trim().as_bytes(), 10).ok_or_else(|| parse_err("rational", input))?;
        let q = BigInt::parse_bytes(q.trim().as_bytes(), 10).ok_or_else(|| parse_err("rational", input))?;
        if q.is_zero() {
            return Err(parse_err("rational", input));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| parse_err("rational", input))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::parse_bytes(all.as_bytes(), 10)?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// taken as the last continued-fraction convergent that fits.
pub fn approximate(x: &Rational, max_den: u64) -> Rational {
    let max_den = BigInt::from(max_den.max(1));
    if x.denom() <= &max_den {
        return x.clone();
    }
    // Convergents h_k / k_k.
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut best = Rational::from_integer(x.floor().to_integer());
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            break;
        }
        best = Rational::new(h_next.clone(), k_next.clone());
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        num = std::mem::replace(&mut den, r);
    }
    best
}

/// Converts a finite float to a rational with denominator at most `max_den`.
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    match Rational::from_f64(x) {
        Some(exact) => approximate(&exact, max_den),
        None => Rational::zero(),
    }
}

/// Largest `p / den` (for integer `p ≥ 0`) whose square is at most `sq`.
pub fn sqrt_floor(sq: &Rational, den: u64) -> Rational {
    if !sq.is_positive() {
        return Rational::zero();
    }
    let den = BigInt::from(den.max(1));
    let scaled = (sq.numer() * &den * &den) / sq.denom();
    Rational::new(scaled.sqrt(), den)
}

pub fn rational_from_ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) mod serde_rational {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

pub(crate) mod serde_rational_opt {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_str(&format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(de::Error::custom))
            .transpose()
    }
}
