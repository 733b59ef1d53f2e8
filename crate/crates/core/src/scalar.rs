use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficient field shared by the floating and the exact rational pipelines.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_u64(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses a decimal literal such as `-0.25`, `3` or `1.5e-3`.
    /// Rationals are parsed exactly.
    fn from_decimal(text: &str) -> Option<Self>;

    fn is_negative(&self) -> bool;

    /// Exact textual form: shortest round-trip decimal for floats, `p/q` for rationals.
    fn render(&self) -> String;
}

impl Scalar for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_decimal(text: &str) -> Option<Self> {
        text.parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl Scalar for BigRational {
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_decimal(text: &str) -> Option<Self> {
        let text = text.trim();
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => (&text[..pos], text[pos + 1..].parse::<i64>().ok()?),
            None => (text, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return None;
        }
        let all_digits = format!("{int_part}{frac_part}");
        let numer: BigInt = all_digits.parse().ok()?;
        let scale = exponent - frac_part.len() as i64;
        let ten = BigInt::from(10u32);
        let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
        let mut value = if scale >= 0 {
            BigRational::from_integer(numer * power)
        } else {
            BigRational::new(numer, power)
        };
        if negative {
            value = -value;
        }
        Some(value)
    }

    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// Exact rational equal to the shortest decimal that round-trips `x`.
pub fn rationalize(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    BigRational::from_decimal(&format!("{x:e}"))
}

/// Absolute value as an `f64`, used for display and thresholds.
pub fn magnitude<S: Scalar>(x: &S) -> f64 {
    x.to_f64().abs()
}
