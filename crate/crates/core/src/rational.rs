//! Exact rational numbers.
//!
//! Everything in this crate is computed over [`Rational`], an arbitrary
//! precision fraction kept in lowest terms with a positive denominator.
//! No floating point value ever enters a computation.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

/// Builds a rational from an integer.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Builds `num/den`. Panics if `den` is zero.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_integral(v: &Rational) -> bool {
    v.is_integer()
}

pub fn is_zero_one(v: &Rational) -> bool {
    v.is_zero() || v.is_one()
}

pub fn is_nonneg(v: &Rational) -> bool {
    !v.is_negative()
}

/// Parses `"p"`, `"-p"` or `"p/q"`. Decimal points and exponents are
/// rejected: the value would not be exact.
pub fn parse(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "`{s}` is not an exact rational; write integers or \"p/q\" strings (floats are refused)"
        )));
    }
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form p or p/q"));
    match t.split_once('/') {
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("`{s}` has a zero denominator")));
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format(v: &Rational) -> String {
    v.to_string()
}

/// Serde adapter writing a rational as its canonical string.
pub mod as_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for optional rationals.
pub mod as_opt_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&super::format(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| super::parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Parses a JSON value that is either an integer or a rational string.
pub fn from_json(v: &serde_json::Value) -> Result<Rational, Error> {
    match v {
        serde_json::Value::String(s) => parse(s),
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                Err(Error::Parse(format!(
                    "float literal {n} refused: all arithmetic is exact, write \"p/q\" instead"
                )))
            } else {
                parse(&n.to_string())
            }
        }
        other => Err(Error::Parse(format!("expected an integer or \"p/q\" string, got {other}"))),
    }
}
