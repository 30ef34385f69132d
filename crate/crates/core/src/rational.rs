//! Exact rational helpers shared by the polytope, LP and raffle code.
//!
//! Values travel through JSON as `"p/q"` strings (or bare integers such as
//! `"3"`), so they survive a round trip bit for bit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, integers, and finite decimals such as `"-0.5"` or
/// `"2.5e-3"` into an exact rational.
pub fn parse(input: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError {
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{whole}{frac}");
    let mut numer: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| err())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a rational vector by a positive factor so that its entries become
/// coprime integers. The zero vector is returned unchanged.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    primitive(ints)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

pub fn to_rationals(v: &[BigInt]) -> Vec<Rational> {
    v.iter().cloned().map(Rational::from_integer).collect()
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

pub mod serde_str {
    //! Serde adapters that encode rationals as `"p/q"` strings.
    use super::{format, parse, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = RawNumber::deserialize(d)?;
        raw.into_rational().map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<RawNumber>::deserialize(d)?;
            raw.into_iter()
                .map(|r| r.into_rational().map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            let strings: Vec<Vec<String>> =
                m.iter().map(|row| row.iter().map(format).collect()).collect();
            serde::Serialize::serialize(&strings, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Rational>>, D::Error> {
            let raw = Vec::<Vec<RawNumber>>::deserialize(d)?;
            raw.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|r| r.into_rational().map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    /// Accepts either a string (`"1/2"`, `"-0.5"`) or a JSON number.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawNumber {
        Str(String),
        Int(i64),
        Float(f64),
    }

    impl RawNumber {
        pub(crate) fn into_rational(self) -> Result<Rational, String> {
            match self {
                RawNumber::Str(s) => parse(&s).map_err(|e| e.to_string()),
                RawNumber::Int(i) => Ok(super::int(i)),
                RawNumber::Float(f) => {
                    super::from_f64(f).ok_or_else(|| format!("non-finite number {f}"))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("6/-4").unwrap(), ratio(-3, 2));
        assert_eq!(parse("2.5e-3").unwrap(), ratio(1, 400));
        assert_eq!(parse(".25").unwrap(), ratio(1, 4));
        assert_eq!(parse("1e2").unwrap(), int(100));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1.2.3", "-", "1/2/3", "0x10"] {
            assert!(parse(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn primitive_scaling_keeps_sign() {
        let v = vec![ratio(-1, 2), ratio(3, 4), int(0)];
        let p = primitive_integer(&v);
        assert_eq!(p, vec![BigInt::from(-2), BigInt::from(3), BigInt::from(0)]);
    }

    #[test]
    fn format_round_trips() {
        for r in [ratio(-7, 3), int(0), int(12), ratio(1, 1024)] {
            assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }
}
