//! Numeric types shared by every solver path.
//!
//! Instance data and linear/table costs are exact rationals. Costs that are
//! irrational by nature (concave-cardinality) run in `f64`. Code that has to
//! work in both regimes is written against [`Scalar`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance used for every floating comparison.
pub const FLOAT_TOL: f64 = 1e-9;

/// Arbitrary precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// Exact binary value of a finite float.
    pub fn from_float(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rational)
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts integers, `a/b` fractions, plain decimals (`0.25`) and, as a
    /// last resort, anything `f64` parses (converted exactly).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(Rational(BigRational::from_integer(n)));
        }
        if !t.contains(['e', 'E']) {
            if let Some((int, frac)) = t.split_once('.') {
                let negative = int.starts_with('-');
                let int_digits = int.trim_start_matches(['-', '+']);
                if frac.chars().all(|c| c.is_ascii_digit())
                    && int_digits.chars().all(|c| c.is_ascii_digit())
                    && !(int_digits.is_empty() && frac.is_empty())
                {
                    let digits = format!("{}{}", int_digits, frac);
                    let numer: BigInt = if digits.is_empty() {
                        BigInt::zero()
                    } else {
                        digits.parse().map_err(|_| err())?
                    };
                    let denom = num_traits::pow(BigInt::from(10u8), frac.len());
                    let r = BigRational::new(numer, denom);
                    return Ok(Rational(if negative { -r } else { r }));
                }
            }
        }
        let v: f64 = t.parse().map_err(|_| err())?;
        Rational::from_float(v).ok_or_else(err)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(v) = self.0.numer().to_i64() {
                return serializer.serialize_i64(v);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(serde_json::Number),
            Str(String),
        }
        let text = match Repr::deserialize(deserializer)? {
            Repr::Num(n) => n.to_string(),
            Repr::Str(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| &a + b)
    }
}

/// Ordered field used by the LP subroutine, the Lovász machinery and the
/// brute-force checkers. `f64` compares with [`FLOAT_TOL`]; `Rational` is
/// exact.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(v: &Rational) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Zero up to the scalar's tolerance.
    fn is_zero_tol(&self) -> bool;

    fn is_pos(&self) -> bool {
        !self.is_zero_tol() && *self > Self::zero()
    }

    fn is_neg(&self) -> bool {
        !self.is_zero_tol() && *self < Self::zero()
    }

    /// `self > other` beyond tolerance.
    fn exceeds(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_pos()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(v: &Rational) -> Self {
        v.to_f64()
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero_tol(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v)
    }
    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn is_zero_tol(&self) -> bool {
        self.is_zero()
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("2/3".parse::<Rational>().unwrap(), Rational::new(2, 3));
        assert_eq!("0.5".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-1.25".parse::<Rational>().unwrap(), Rational::new(-5, 4));
        assert_eq!("1000".parse::<Rational>().unwrap(), Rational::from_integer(1000));
        assert_eq!("1e3".parse::<Rational>().unwrap(), Rational::from_integer(1000));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let v: Vec<Rational> = serde_json::from_str(r#"[1, 0.1, "2/3"]"#).unwrap();
        assert_eq!(v[1], Rational::new(1, 10));
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"[1,"1/10","2/3"]"#);
        let back: Vec<Rational> = serde_json::from_str(&text).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(2, 2), 1);
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn float_tolerance() {
        assert!(1e-12f64.is_zero_tol());
        assert!(!1e-6f64.is_zero_tol());
        assert!(!Rational::new(1, 1_000_000_000_000).is_zero_tol());
    }
}
