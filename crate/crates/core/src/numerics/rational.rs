//! Exact scalars: big rationals, their `p/q` string form, and the
//! extended cardinal used for kernel dimensions and the `p` of
//! p-majorization.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational string")]
    Empty,
    #[error("malformed rational {0:?}: expected \"p/q\" or an integer")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"p/q"` or `"p"`. Decimal points and exponents are rejected so
/// that no float ever leaks into an exact computation.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-k` for `k >= 0`.
pub fn pow2_inv(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Smallest integer `c` with `2^c >= x`, for `x > 0`.
pub fn ceil_log2(x: &Rational) -> i64 {
    assert!(x.is_positive(), "ceil_log2 of non-positive value");
    // Start from the bit-length estimate and correct by at most a couple of steps.
    let mut c = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two_pow = |c: i64| -> Rational {
        if c >= 0 {
            Rational::from_integer(BigInt::one() << c as u64)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-c) as u64)
        }
    };
    while two_pow(c) < *x {
        c += 1;
    }
    while two_pow(c - 1) >= *x {
        c -= 1;
    }
    c
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// serde adapter: a single rational as a string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter: `Option<Rational>` as an optional string.
pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// serde adapter: `Vec<Rational>` as an array of strings.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A cardinal in `{0, 1, 2, ...} ∪ {∞}`: kernel dimensions, zero-set
/// differences, and the `p` of p-majorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinal {
    Finite(usize),
    Infinite,
}

impl Cardinal {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinal::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Cardinal::Finite(n) => Some(n),
            Cardinal::Infinite => None,
        }
    }

    pub fn saturating_add(self, other: Cardinal) -> Cardinal {
        match (self, other) {
            (Cardinal::Finite(a), Cardinal::Finite(b)) => Cardinal::Finite(a + b),
            _ => Cardinal::Infinite,
        }
    }
}

impl PartialOrd for Cardinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cardinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cardinal::Finite(a), Cardinal::Finite(b)) => a.cmp(b),
            (Cardinal::Finite(_), Cardinal::Infinite) => Ordering::Less,
            (Cardinal::Infinite, Cardinal::Finite(_)) => Ordering::Greater,
            (Cardinal::Infinite, Cardinal::Infinite) => Ordering::Equal,
        }
    }
}

impl From<usize> for Cardinal {
    fn from(n: usize) -> Self {
        Cardinal::Finite(n)
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Finite(n) => write!(f, "{n}"),
            Cardinal::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Cardinal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Cardinal::Infinite),
            other => other
                .parse::<usize>()
                .map(Cardinal::Finite)
                .map_err(|_| format!("expected a non-negative integer or \"inf\", got {other:?}")),
        }
    }
}

impl Serialize for Cardinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cardinal::Finite(n) => s.serialize_u64(*n as u64),
            Cardinal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(Cardinal::Finite(n as usize)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational(" 1 / 1024 ").unwrap(), pow2_inv(10));
        assert!(matches!(parse_rational("0.5"), Err(ParseRationalError::Malformed(_))));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(matches!(parse_rational(""), Err(ParseRationalError::Empty)));
        assert_eq!(format_rational(&rat(4, 6)), "2/3");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn ceil_log2_matches_powers() {
        assert_eq!(ceil_log2(&int(8)), 3);
        assert_eq!(ceil_log2(&int(9)), 4);
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&rat(1, 2)), -1);
        assert_eq!(ceil_log2(&rat(3, 4)), 0);
        assert_eq!(ceil_log2(&rat(1, 3)), -1);
    }

    #[test]
    fn to_f64_is_close() {
        assert_eq!(to_f64(&rat(1, 4)), 0.25);
        assert!((to_f64(&rat(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(to_f64(&pow2_inv(600)), 2f64.powi(-600));
    }

    #[test]
    fn cardinal_order_and_text() {
        assert!(Cardinal::Finite(3) < Cardinal::Infinite);
        assert_eq!("inf".parse::<Cardinal>().unwrap(), Cardinal::Infinite);
        assert_eq!("4".parse::<Cardinal>().unwrap(), Cardinal::Finite(4));
        assert_eq!(serde_json::to_string(&Cardinal::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Cardinal>("2").unwrap(), Cardinal::Finite(2));
    }
}
