//! Scalar fields used throughout the crate.
//!
//! Every structure is generic over a [`Scalar`]. Two implementations exist:
//! arbitrary-precision rationals ([`Rational`]) for exact verification and
//! `f64` for numerical search. A structure never mixes the two.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Which arithmetic a structure lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    Rational,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Rational => "rational",
            ScalarMode::Float => "float",
        }
    }
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(ScalarMode::Rational),
            "float" => Ok(ScalarMode::Float),
            other => Err(Error::Parse(format!("unknown scalar mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ScalarMode;

    fn from_i64(n: i64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_i64(numer) / Self::from_i64(denom)
    }

    fn from_rational(q: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact zero test for rationals, `|x| <= eps` for floats.
    fn is_negligible(&self, eps: f64) -> bool;

    /// `|x|` as a float, used for residual norms.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Strict positivity, exact for rationals.
    fn is_positive(&self) -> bool;

    /// Textual form used in JSON documents.
    fn to_json(&self) -> serde_json::Value;

    /// Parses a textual scalar (`p/q`, integer or decimal).
    fn parse(text: &str) -> Result<Self>;

    fn is_exact() -> bool {
        Self::MODE == ScalarMode::Rational
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Rational;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn is_negligible(&self, _eps: f64) -> bool {
        self.is_zero()
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn parse(text: &str) -> Result<Self> {
        parse_rational(text)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, eps: f64) -> bool {
        self.abs() <= eps
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let value = if text.contains('/') {
            rational_to_f64(&parse_rational(text)?)
        } else {
            text.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: `{text}`")))?
        };
        finite(value)
    }
}

/// Rejects NaN and infinities.
pub fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite)
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Huge numerator or denominator: shift both down before dividing.
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `p/q` with an explicit denominator, integers included (`3/1`).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q`, an integer, or a finite decimal (`-1.25`, `3e-2`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: `{text}`"));
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = text[pos + 1..].parse().map_err(|_| bad())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
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
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    for _ in 0..scale.unsigned_abs() {
        value = if scale > 0 { value * &ten } else { value / &ten };
    }
    Ok(if negative { -value } else { value })
}
