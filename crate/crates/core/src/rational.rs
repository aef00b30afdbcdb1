//! Exact rationals and their string forms.
//!
//! Values are `num_rational::BigRational`, which keeps `gcd(|num|, den) = 1`
//! and `den > 0`. The wire form is `"p/q"` or a bare integer; decimal strings
//! such as `"5.5"` are also accepted on input and converted exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"`, `"p"` or a finite decimal like `"-5.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, fractional)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = fractional.len() as u32;
        if digits == 0 || !fractional.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole_part: BigInt = match whole {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = fractional.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let magnitude = whole_part.abs() * &scale + frac_part;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing a rational as its string form.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a point given as two rational strings.
pub mod serde_point {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
        [super::to_string(&p.0), super::to_string(&p.1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rational, Rational), D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        let x = super::parse(&x).map_err(serde::de::Error::custom)?;
        let y = super::parse(&y).map_err(serde::de::Error::custom)?;
        Ok((x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_wire_forms() {
        assert_eq!(parse("11/2").unwrap(), frac(11, 2));
        assert_eq!(parse("-22/4").unwrap(), frac(-11, 2));
        assert_eq!(parse("15").unwrap(), int(15));
        assert_eq!(parse("5.5").unwrap(), frac(11, 2));
        assert_eq!(parse("-0.25").unwrap(), frac(-1, 4));
        assert_eq!(parse("-.5").unwrap(), frac(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn zero_is_normalized() {
        let z = parse("0/7").unwrap();
        assert_eq!(z.denom(), &BigInt::one());
        assert_eq!(to_string(&z), "0");
        assert_eq!(to_string(&frac(6, -4)), "-3/2");
    }
}
