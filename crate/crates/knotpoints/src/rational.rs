//! Exact rationals and their decimal-string encoding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exact value of a finite double.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `2^-k` for integer `k >= 0`.
pub fn pow2_neg(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn half(x: &Q) -> Q {
    x / q(2)
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn clamp01(x: Q) -> Q {
    if x.is_negative() {
        Q::zero()
    } else if x > Q::one() {
        Q::one()
    } else {
        x
    }
}

/// Parses `"3"`, `"-0.125"`, `"1.5e-3"` or `"7/12"` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    let mut v = Q::from_integer(digits);
    if scale >= 0 {
        v *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

/// Terminating decimals are written out in full; anything else as `p/q`.
pub fn fmt_q(x: &Q) -> String {
    let mut d = x.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    let places = twos.max(fives);
    if places == 0 {
        return x.numer().to_string();
    }
    let scaled = x * Q::from_integer(num_traits::pow(BigInt::from(10), places));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = format!("{s:0>width$}", width = places + 1);
    let (ip, fp) = s.split_at(s.len() - places);
    let fp = fp.trim_end_matches('0');
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

pub mod serde_q {
    //! Serde adapters writing rationals as decimal strings.
    use super::{fmt_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse_q(s).map_err(serde::de::Error::custom)).collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_some(&fmt_q(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
            Option::<String>::deserialize(d)?.map(|s| parse_q(&s).map_err(serde::de::Error::custom)).transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3").unwrap(), q(3));
        assert_eq!(parse_q("-0.125").unwrap(), qr(-1, 8));
        assert_eq!(parse_q("1.5e-3").unwrap(), qr(3, 2000));
        assert_eq!(parse_q("7/12").unwrap(), qr(7, 12));
        assert_eq!(parse_q(".5").unwrap(), qr(1, 2));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn format_roundtrip() {
        for x in [q(0), q(-4), qr(1, 3), qr(-3, 8), qr(1, 10), qr(123, 1000), from_f64(0.1)] {
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x, "{}", fmt_q(&x));
        }
        assert_eq!(fmt_q(&qr(1, 4)), "0.25");
        assert_eq!(fmt_q(&qr(-1, 40)), "-0.025");
        assert_eq!(fmt_q(&qr(2, 3)), "2/3");
    }

    #[test]
    fn float_is_exact() {
        assert_eq!(from_f64(0.375), qr(3, 8));
        assert_eq!(to_f64(&qr(1, 3)), 1.0 / 3.0);
        assert_eq!(pow2_neg(3), qr(1, 8));
    }
}
