//! Exact rational scalars and their `"num/den"` text form.
//!
//! Every quantity that can be a non-integer (rates, bounds, the slack
//! parameter of the equilibrium definitions) is a [`Rat`]. Nothing in this
//! crate goes through floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision signed rational, always kept in lowest terms with a
/// positive denominator (maintained by `num-rational`).
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal: {0}")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3"`, or `"299/100"`.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| RatParseError::BadInteger(num.to_string()))?;
    let den: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| RatParseError::BadInteger(d.to_string()))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(RatParseError::ZeroDenominator);
    }
    Ok(Rat::new(num, den))
}

/// Formats in lowest terms: `"3"` for integers, `"299/100"` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Positive part, `max(r, 0)`.
pub fn pos(r: Rat) -> Rat {
    if r.is_negative() {
        Rat::zero()
    } else {
        r
    }
}

/// Serde adapter serializing a [`Rat`] as its `"num/den"` string.
pub mod serde_str {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rat(&raw).map_err(de::Error::custom)
    }
}

/// Same adapter for `(Rat, Rat)` pairs, used by vertex lists.
pub mod serde_str_pair {
    use super::{fmt_rat, parse_rat, Rat};
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &(Rat, Rat), s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&fmt_rat(&p.0))?;
        seq.serialize_element(&fmt_rat(&p.1))?;
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rat, Rat), D::Error> {
        let raw: [String; 2] = Deserialize::deserialize(d)?;
        Ok((
            parse_rat(&raw[0]).map_err(de::Error::custom)?,
            parse_rat(&raw[1]).map_err(de::Error::custom)?,
        ))
    }
}
