//! Numeric backends.
//!
//! Every table and act is generic over [`Scalar`]. Law checks run on exact
//! rationals; transcendental work (non-integer exponents, exp/log, quadrature)
//! runs on `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance for capacity invariants and exact-zero tests on floats.
pub const INVARIANT_TOL: f64 = 1e-12;
/// Default tolerance for float law comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
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
    const BACKEND: Backend;

    fn from_int(v: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// `None` for NaN or infinities.
    fn from_f64(v: f64) -> Option<Self>;

    fn as_f64(&self) -> f64;

    /// Accepts `"p/q"`, integers and decimals (with optional exponent).
    fn parse_str(s: &str) -> Result<Self>;

    fn is_finite(&self) -> bool;

    /// Equality for law checks: exact on rationals, `|a - b| <= tol` on floats.
    fn near(&self, other: &Self, tol: f64) -> bool;

    fn pow_u32(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `"p/q"` for rationals, 12 significant digits for floats.
    fn render(&self) -> String;

    /// Exact zero on rationals, `|x| <= 1e-12` on floats.
    fn is_negligible(&self) -> bool {
        self.near(&Self::zero(), INVARIANT_TOL)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn parse_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            if d == 0.0 {
                return Err(Error::Parse(s.to_string()));
            }
            return Ok(n / d);
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse(s.to_string()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(s.to_string()))
        }
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn render(&self) -> String {
        format_sig(*self, 12)
    }
}

/// Decimal rendering with `sig` significant digits, trailing zeros trimmed.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - magnitude;
    if !(0..=20).contains(&decimals) || magnitude < -6 {
        return format!("{:.*e}", sig - 1, v);
    }
    let s = format!("{:.*}", decimals as usize, v);
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if t.contains('/') {
        let r = Rational::from_str(t).map_err(|_| bad())?;
        return Ok(r);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer =
        BigInt::from_str(if joined.is_empty() { "0" } else { &joined }).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Exact rational from an `f64` only when it is a short decimal like `0.6`:
/// the shortest round-trip decimal string is parsed exactly.
pub fn rational_from_decimal_f64(v: f64) -> Result<Rational> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v.to_string()));
    }
    parse_rational(&format!("{v:?}"))
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_scalar<T: Scalar>(n: u32, k: u32) -> T {
    match T::BACKEND {
        Backend::Rational => T::parse_str(&binomial(n, k).to_string()).expect("integer literal"),
        Backend::Float => T::from_f64(binomial(n, k).to_f64().unwrap_or(f64::INFINITY))
            .unwrap_or_else(|| T::from_int(i64::MAX)),
    }
}
