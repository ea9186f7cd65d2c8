//! Exact rational numbers for means, gaps and productivity figures.
//!
//! Values are compared exactly and only rounded when displayed. On disk a
//! fraction is a string: `"7"`, `"-3/2"`, or a finite decimal like `"7.5"`.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fraction(Ratio<i64>);

impl Fraction {
    pub fn new(numer: i64, denom: i64) -> Self {
        Fraction(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Fraction(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Fraction(Ratio::zero())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Fraction(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Fraction) -> Option<Fraction> {
        num_traits::CheckedDiv::checked_div(&self.0, &rhs.0).map(Fraction)
    }

    pub fn checked_sub(&self, rhs: &Fraction) -> Option<Fraction> {
        num_traits::CheckedSub::checked_sub(&self.0, &rhs.0).map(Fraction)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Rounds half away from zero to `places` decimals and renders the result
    /// with exactly that many digits after the point.
    pub fn to_decimal_string(&self, places: u32) -> String {
        let scale = 10i128.pow(places);
        let n = *self.0.numer() as i128 * scale;
        let d = *self.0.denom() as i128;
        let q = n / d;
        let r = n % d;
        let rounded = if 2 * r.abs() >= d { q + n.signum() } else { q };
        let sign = if rounded < 0 { "-" } else { "" };
        let abs = rounded.abs();
        if places == 0 {
            return format!("{sign}{abs}");
        }
        format!(
            "{sign}{}.{:0width$}",
            abs / scale,
            abs % scale,
            width = places as usize
        )
    }
}

impl From<i64> for Fraction {
    fn from(n: i64) -> Self {
        Fraction::from_integer(n)
    }
}

impl Add for Fraction {
    type Output = Fraction;
    fn add(self, rhs: Self) -> Self {
        Fraction(self.0 + rhs.0)
    }
}

impl Sub for Fraction {
    type Output = Fraction;
    fn sub(self, rhs: Self) -> Self {
        Fraction(self.0 - rhs.0)
    }
}

impl Mul for Fraction {
    type Output = Fraction;
    fn mul(self, rhs: Self) -> Self {
        Fraction(self.0 * rhs.0)
    }
}

impl Div for Fraction {
    type Output = Fraction;
    fn div(self, rhs: Self) -> Self {
        Fraction(self.0 / rhs.0)
    }
}

impl Neg for Fraction {
    type Output = Fraction;
    fn neg(self) -> Self {
        Fraction(-self.0)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parsed numerators and denominators are capped so that downstream
/// arithmetic (sums of a few hundred values, quotients) cannot overflow.
const MAX_PARSED: i64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number {0:?}")]
pub struct ParseFractionError(String);

impl FromStr for Fraction {
    type Err = ParseFractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFractionError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 || n.unsigned_abs() > MAX_PARSED as u64 || d.unsigned_abs() > MAX_PARSED as u64 {
                return Err(err());
            }
            return Ok(Fraction::new(n, d));
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let negative = int.starts_with('-');
            let int_val: i64 = match int {
                "" | "-" | "+" => 0,
                _ => int.parse().map_err(|_| err())?,
            };
            let denom = 10i64.pow(frac.len() as u32);
            let frac_val: i64 = frac.parse().map_err(|_| err())?;
            let whole = int_val.checked_mul(denom).ok_or_else(err)?;
            let numer = if negative {
                whole.checked_sub(frac_val)
            } else {
                whole.checked_add(frac_val)
            }
            .ok_or_else(err)?;
            if numer.unsigned_abs() > MAX_PARSED as u64 {
                return Err(err());
            }
            return Ok(Fraction::new(numer, denom));
        }
        match t.parse::<i64>() {
            Ok(n) if n.unsigned_abs() <= MAX_PARSED as u64 => Ok(Fraction::from_integer(n)),
            _ => Err(err()),
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_decimal_rounding() {
        assert_eq!(Fraction::new(49, 16).to_decimal_string(2), "3.06");
        assert_eq!(Fraction::new(94, 13).to_decimal_string(2), "7.23");
        assert_eq!(Fraction::new(55, 7).to_decimal_string(2), "7.86");
        assert_eq!(Fraction::new(89, 11).to_decimal_string(2), "8.09");
        assert_eq!(Fraction::new(-1, 8).to_decimal_string(2), "-0.13");
        assert_eq!(Fraction::new(1, 200).to_decimal_string(2), "0.01");
        assert_eq!(Fraction::zero().to_decimal_string(2), "0.00");
        assert_eq!(Fraction::new(7, 2).to_decimal_string(0), "4");
    }

    #[test]
    fn test_parse() {
        assert_eq!("7".parse::<Fraction>().unwrap(), Fraction::from_integer(7));
        assert_eq!("15/2".parse::<Fraction>().unwrap(), Fraction::new(15, 2));
        assert_eq!("7.5".parse::<Fraction>().unwrap(), Fraction::new(15, 2));
        assert_eq!("-0.25".parse::<Fraction>().unwrap(), Fraction::new(-1, 4));
        assert!("1/0".parse::<Fraction>().is_err());
        assert!("abc".parse::<Fraction>().is_err());
        assert!("1.".parse::<Fraction>().is_err());
        assert!("99999999999999999999".parse::<Fraction>().is_err());
    }

    #[test]
    fn test_serde_as_string() {
        let f = Fraction::new(3, 2);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "\"3/2\"");
        assert_eq!(serde_json::from_str::<Fraction>(&s).unwrap(), f);
    }
}
