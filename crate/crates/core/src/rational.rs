//! Exact rationals and their `"p/q"` string encoding.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

/// Exact rational number used for every sequence value and density.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_u64(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Accepts `p/q`, `p`, and finite decimals such as `-0.25`.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let int_part = BigInt::from_str(if int.is_empty() || int == "-" { "0" } else { int })
            .map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| err())?;
        let mag = int_part.abs() * &scale + frac_part;
        let v = Q::new(mag, scale);
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(s).map(Q::from_integer).map_err(|_| err())
}

pub fn to_f64(v: &Q) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

/// Closest rational to a finite float (exact binary expansion).
pub fn from_f64(v: f64) -> Q {
    Q::from_float(v).unwrap_or_else(Q::zero)
}

pub fn abs_q(v: &Q) -> Q {
    v.abs()
}

pub fn serialize_q<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(v))
}

/// Rationals are normally strings, but plain JSON integers are accepted too.
pub fn deserialize_q<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Str(String),
        Int(i64),
    }
    match Raw::deserialize(d)? {
        Raw::Str(s) => parse_q(&s).map_err(de::Error::custom),
        Raw::Int(i) => Ok(qi(i)),
    }
}

pub mod serde_q {
    pub use super::deserialize_q as deserialize;
    pub use super::serialize_q as serialize;
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_q(&s).map_err(de::Error::custom),
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(qi)
                    .ok_or_else(|| de::Error::custom("non-integer JSON number for rational")),
                other => Err(de::Error::custom(format!("expected rational, got {other}"))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_q("-7").unwrap(), qi(-7));
        assert_eq!(parse_q("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_q("1.5").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn format_round_trip() {
        for v in [q(1, 2), qi(0), q(-22, 7), qi(5)] {
            assert_eq!(parse_q(&format_q(&v)).unwrap(), v);
        }
        assert_eq!(format_q(&q(4, 2)), "2");
    }
}
