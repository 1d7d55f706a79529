//! Exact rational helpers and the textual `"a/b"` format.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Small exact rational used for apartment coordinates and levels.
pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// Floor of a small rational.
pub fn floor_q(x: Q) -> i64 {
    Integer::div_floor(x.numer(), x.denom())
}

/// Ceiling of a small rational.
pub fn ceil_q(x: Q) -> i64 {
    -Integer::div_floor(&(-x.numer()), x.denom())
}

pub fn is_integer(x: Q) -> bool {
    *x.denom() == 1
}

pub fn to_big(x: Q) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// Formats a rational as `"a/b"` (integers keep the `/1`).
pub fn format_ratio<T: std::fmt::Display + Clone + Integer>(x: &Ratio<T>) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().ok()?;
            let b: i64 = b.trim().parse().ok()?;
            if b == 0 {
                None
            } else {
                Some(Q::new(a, b))
            }
        }
        None => s.parse::<i64>().ok().map(Q::from_integer),
    }
}

pub fn parse_big(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// If `x` is `base^e` for an integer `e` (possibly negative), returns `e`.
pub fn log_exact(x: &BigRational, base: u64) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    let b = BigInt::from(base);
    let pow_of = |mut v: BigInt| -> Option<i64> {
        let mut e = 0i64;
        while v > BigInt::one() {
            let (quo, rem) = v.div_rem(&b);
            if !rem.is_zero() {
                return None;
            }
            v = quo;
            e += 1;
        }
        Some(e)
    };
    let num = pow_of(x.numer().clone())?;
    let den = pow_of(x.denom().clone())?;
    if num > 0 && den > 0 {
        None
    } else {
        Some(num - den)
    }
}

pub fn big_pow(base: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b, (-e) as usize).recip()
    }
}

/// Lossy conversion used only for log output.
pub fn approx(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_q {
    //! `serde` adapters writing rationals as `"a/b"` strings.
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_ratio(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| parse_q(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        }
    }
}

pub mod serde_big {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_big(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod serde_bigint {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad integer {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor_q(q(-1, 2)), -1);
        assert_eq!(ceil_q(q(-1, 2)), 0);
        assert_eq!(ceil_q(q(1, 2)), 1);
        assert_eq!(floor_q(qi(3)), 3);
        assert_eq!(ceil_q(qi(-3)), -3);
    }

    #[test]
    fn text_format() {
        assert_eq!(format_ratio(&q(-3, 6)), "-1/2");
        assert_eq!(parse_q("5/8"), Some(q(5, 8)));
        assert_eq!(parse_q("2"), Some(qi(2)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn exact_logs() {
        assert_eq!(log_exact(&big_pow(5, 3), 5), Some(3));
        assert_eq!(log_exact(&big_pow(5, -2), 5), Some(-2));
        assert_eq!(log_exact(&BigRational::one(), 5), Some(0));
        assert_eq!(log_exact(&parse_big("2/5").unwrap(), 5), None);
        assert_eq!(log_exact(&parse_big("-5").unwrap(), 5), None);
    }
}
