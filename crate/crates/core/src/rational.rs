//! Exact scalar helpers: rational parsing/formatting, complex rationals and
//! integer ceilings.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Complex number with exact rational components.
pub type ComplexRational = Complex<BigRational>;

pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer. Decimal and exponent forms
/// are rejected so that no float ever crosses the boundary.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not an exact rational: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Least integer greater than or equal to `value`.
pub fn ceil(value: &BigRational) -> BigInt {
    let (q, r) = value.numer().div_mod_floor(value.denom());
    if r.is_zero() {
        q
    } else {
        q + BigInt::one()
    }
}

/// Lossy conversion used only for human-readable output.
pub fn approx_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Very large or very small magnitudes: go through the exponent.
        let n = value.numer().abs().to_string().len() as i32;
        let d = value.denom().to_string().len() as i32;
        let sign = if value.is_negative() { -1.0 } else { 1.0 };
        sign * 10f64.powi(n - d)
    })
}

/// Scientific notation of a nonnegative integer rounded to `digits`
/// significant digits: returns `(mantissa, exponent)` with the mantissa as a
/// decimal string such as `"1.4"`.
pub fn scientific(value: &BigInt, digits: usize) -> (String, usize) {
    assert!(digits >= 1);
    let text = value.abs().to_string();
    if text.len() <= digits {
        let exponent = text.len() - 1;
        let mut mantissa = text[..1].to_string();
        if text.len() > 1 {
            mantissa.push('.');
            mantissa.push_str(&text[1..]);
        }
        return (mantissa, exponent);
    }
    let head: BigInt = text[..digits].parse().expect("decimal digits");
    let next = text.as_bytes()[digits] - b'0';
    let mut rounded = if next >= 5 { head + 1 } else { head };
    let mut exponent = text.len() - 1;
    let mut rounded_text = rounded.to_string();
    if rounded_text.len() > digits {
        // 9.99 -> 10.0
        rounded /= 10;
        rounded_text = rounded.to_string();
        exponent += 1;
    }
    let mantissa = if digits == 1 {
        rounded_text
    } else {
        format!("{}.{}", &rounded_text[..1], &rounded_text[1..])
    };
    (mantissa, exponent)
}
