//! Exact rationals for parameters that gate constructions and for brute-force
//! quantities.

use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num_rational::Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as a rational (expected `p/q`, an integer, or a decimal)")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, an integer, or a finite decimal such as `0.25` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = i128::from_str(p.trim()).map_err(|_| err())?;
        let q = i128::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(whole) || !digits_ok(frac) || frac.len() > 30 {
        return Err(err());
    }
    let whole_val = if whole.is_empty() {
        0
    } else {
        i128::from_str(whole).map_err(|_| err())?
    };
    let mut value = Rational::from_integer(whole_val);
    if !frac.is_empty() {
        let denom = 10i128.checked_pow(frac.len() as u32).ok_or_else(err)?;
        let num = i128::from_str(frac).map_err(|_| err())?;
        value += Rational::new(num, denom);
    }
    Ok(if negative { -value } else { value })
}

/// `p/q` in lowest terms; integers print as `p/1` so the form is uniform.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter writing a rational as the string `"p/q"`.
pub mod serde_pq {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_pq`] for optional values.
pub mod serde_pq_opt {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_none(),
        }
    }
}
