//! Arbitrary-precision rationals.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AlgebraError, Result};

/// Reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    /// Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(AlgebraError::DivisionByZero)
        } else {
            Ok(Rat(self.0.recip()))
        }
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(Rat(num_traits::pow(self.0.clone(), e as usize)))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn factorial(n: u32) -> Self {
        Rat::from_bigint((1..=n).map(BigInt::from).product())
    }

    pub fn binomial(n: i64, k: i64) -> Self {
        if k < 0 || k > n {
            return Rat::zero();
        }
        let mut acc = BigInt::one();
        for i in 0..k {
            acc *= n - i;
            acc /= i + 1;
        }
        Rat::from_bigint(acc)
    }

    /// Numerator and denominator scaled by a common factor so both are integers.
    pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
        it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat::from_int(n as i64)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_bigint(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_err(input: &str, reason: &str) -> AlgebraError {
    AlgebraError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_decimal(s: &str) -> Result<Rat> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..]
                .parse()
                .map_err(|_| parse_err(s, "bad exponent"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err(s, "empty number"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(parse_err(s, "not a number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| parse_err(s, "bad digits"))?
    };
    let scale = exp - frac_part.len() as i32;
    let ten = Rat::from_int(10);
    let mut r = Rat::from_bigint(n) * ten.pow(scale)?;
    if neg {
        r = -r;
    }
    Ok(r)
}

impl FromStr for Rat {
    type Err = AlgebraError;

    /// Accepts `p/q`, integers and decimal literals such as `0.5` or `1e-3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| parse_err(s, "bad numerator"))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| parse_err(s, "bad denominator"))?;
            return Rat::from_big(p, q).map_err(|_| parse_err(s, "zero denominator"));
        }
        parse_decimal(t)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(&self.0 $op &o.0)
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(self.0 $op o.0)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(self.0 $op &o.0)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(&self.0 $op o.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

/// Panics on division by zero; use [`Rat::inv`] for a checked variant.
impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, o: &Rat) -> Rat {
        Rat(&self.0 / &o.0)
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, o: Rat) -> Rat {
        Rat(self.0 / o.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, o: &Rat) {
        self.0 += &o.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, o: &Rat) {
        self.0 -= &o.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, o: &Rat) {
        self.0 *= &o.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_display() {
        assert_eq!(Rat::new(10, 2).to_string(), "5");
        assert_eq!(Rat::new(3, -7).to_string(), "-3/7");
        assert_eq!(Rat::zero().to_string(), "0");
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("5/1".parse::<Rat>().unwrap(), Rat::from_int(5));
        assert_eq!("-6/4".parse::<Rat>().unwrap(), Rat::new(-3, 2));
        assert_eq!("0.5".parse::<Rat>().unwrap(), Rat::new(1, 2));
        assert_eq!("-1.25e1".parse::<Rat>().unwrap(), Rat::new(-25, 2));
        assert_eq!("3".parse::<Rat>().unwrap(), Rat::from_int(3));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn serde_uses_strings() {
        let r = Rat::new(-3, 7);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"-3/7\"");
        let back: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(Rat::binomial(6, 2), Rat::from_int(15));
        assert_eq!(Rat::factorial(5), Rat::from_int(120));
        assert_eq!(Rat::binomial(3, 4), Rat::zero());
    }
}
