//! Exact dyadic rationals `numerator / 2^exponent`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A rational number whose denominator is a power of two.
///
/// The representation is canonical: either the exponent is zero or the
/// numerator is odd, and zero is always `(0, 0)`. Structural equality is
/// therefore numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            exp,
        };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(n, 0)
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: k,
        }
    }

    pub fn half() -> Self {
        Dyadic::pow2_neg(1)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn denominator(&self) -> BigInt {
        BigInt::one() << self.exp
    }

    pub fn is_negative(&self) -> bool {
        self.num.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    /// Divide by two.
    pub fn halve(&self) -> Dyadic {
        self.shr(1)
    }

    /// Multiply by `2^-k`.
    pub fn shr(&self, k: u32) -> Dyadic {
        Dyadic::new(self.num.clone(), self.exp + k)
    }

    pub fn mul_int(&self, n: i64) -> Dyadic {
        Dyadic::new(&self.num * n, self.exp)
    }

    /// `1 - self`.
    pub fn complement(&self) -> Dyadic {
        Dyadic::one() - self
    }

    pub fn pow(&self, n: u32) -> Dyadic {
        if n == 0 {
            return Dyadic::one();
        }
        Dyadic::new(num_traits::pow(self.num.clone(), n as usize), self.exp * n)
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Dyadic::one()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.denominator())
    }

    /// Exact conversion from a rational whose reduced denominator is a power of two.
    pub fn from_rational(r: &BigRational) -> Option<Dyadic> {
        let den = r.denom();
        if den.sign() != Sign::Plus {
            return None;
        }
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), tz as u32))
    }

    /// Largest dyadic with exponent at most `bits` that is `<= r`.
    pub fn floor_rational(r: &BigRational, bits: u32) -> Dyadic {
        let scaled = r * BigRational::from_integer(BigInt::one() << bits);
        Dyadic::new(scaled.floor().to_integer(), bits)
    }

    /// Round towards +inf keeping at most `bits` fractional bits.
    pub fn round_up(&self, bits: u32) -> Dyadic {
        if self.exp <= bits {
            return self.clone();
        }
        let drop = self.exp - bits;
        let (q, r) = self.num.div_mod_floor(&(BigInt::one() << drop));
        let q = if r.is_zero() { q } else { q + 1 };
        Dyadic::new(q, bits)
    }

    /// Round towards -inf keeping at most `bits` fractional bits.
    pub fn round_down(&self, bits: u32) -> Dyadic {
        if self.exp <= bits {
            return self.clone();
        }
        let drop = self.exp - bits;
        Dyadic::new(self.num.div_floor(&(BigInt::one() << drop)), bits)
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.to_rational().cmp(r)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Numerator as `i64` when it fits.
    pub fn numerator_i64(&self) -> Option<i64> {
        self.num.to_i64()
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }
}

fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u32) {
    let exp = a.exp.max(b.exp);
    (
        &a.num << (exp - a.exp),
        &b.num << (exp - b.exp),
        exp,
    )
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &'a Dyadic) -> Dyadic {
        let (a, b, exp) = aligned(self, rhs);
        Dyadic::new(a + b, exp)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &'a Dyadic) -> Dyadic {
        let (a, b, exp) = aligned(self, rhs);
        Dyadic::new(a - b, exp)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &'a Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &'a Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Dyadic> for &'a Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -(self.clone())
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for Dyadic {
    fn product<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::one(), |acc, x| acc * x)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = aligned(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

/// Prints `p/q` with the denominator written out, or `p/2^e` once the
/// denominator would exceed 64 bits.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            0 => write!(f, "{}", self.num),
            e if e < 64 => write!(f, "{}/{}", self.num, 1u64 << e),
            e => write!(f, "{}/2^{}", self.num, e),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `p`, `p/q` with `q` a power of two, and `p/2^e`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        let (num, den) = match s.split_once('/') {
            None => (s, None),
            Some((n, d)) => (n.trim(), Some(d.trim())),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        match den {
            None => Ok(Dyadic::new(num, 0)),
            Some(d) => {
                if let Some(e) = d.strip_prefix("2^") {
                    let e: u32 = e.parse().map_err(|_| bad())?;
                    return Ok(Dyadic::new(num, e));
                }
                let den: BigInt = d.parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                let r = BigRational::new(num, den);
                Dyadic::from_rational(&r).ok_or_else(bad)
            }
        }
    }
}

impl Serialize for Dyadic {
    /// `{"num": .., "exp": ..}`; the numerator is a JSON integer when it
    /// fits in `i64` and a decimal string otherwise.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Dyadic", 2)?;
        match self.num.to_i64() {
            Some(n) => st.serialize_field("num", &n)?,
            None => st.serialize_field("num", &self.num.to_string())?,
        }
        st.serialize_field("exp", &self.exp)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            Int(i64),
            Text(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            num: Num,
            exp: u32,
        }
        let raw = Raw::deserialize(deserializer)?;
        let num = match raw.num {
            Num::Int(n) => BigInt::from(n),
            Num::Text(t) => t.parse().map_err(de::Error::custom)?,
        };
        let d = Dyadic::new(num, raw.exp);
        if d.exp != raw.exp && !d.num.is_zero() {
            return Err(de::Error::custom("dyadic is not in canonical form"));
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Dyadic::new(4, 3), d("1/2"));
        assert_eq!(Dyadic::new(4, 3).exponent(), 1);
        assert_eq!(Dyadic::new(0, 9).exponent(), 0);
        assert_eq!(Dyadic::new(6, 0).exponent(), 0);
        assert_eq!(Dyadic::new(-12, 4), d("-3/4"));
        assert_eq!(Dyadic::from_int(2).halve(), Dyadic::one());
        assert_eq!(Dyadic::from_int(12).shr(3).exponent(), 1);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(d("1/2") + d("1/8"), d("5/8"));
        assert_eq!(d("5/8") - d("1/2"), d("1/8"));
        assert_eq!(d("3/4") * d("1/2"), d("3/8"));
        assert_eq!(d("1/2").pow(20), Dyadic::pow2_neg(20));
        assert_eq!(d("1/4").complement(), d("3/4"));
    }

    #[test]
    fn rejects_non_dyadic() {
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("1/0".parse::<Dyadic>().is_err());
        assert_eq!("7/2^70".parse::<Dyadic>().unwrap().exponent(), 70);
    }

    #[test]
    fn rounding() {
        let x = d("13/16");
        assert_eq!(x.round_up(2), d("1"));
        assert_eq!(x.round_down(2), d("3/4"));
        assert_eq!(x.round_up(4), x);
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "1", "-3/8", "5/8", "1/2^80"] {
            let x = d(s);
            assert_eq!(x.to_string().parse::<Dyadic>().unwrap(), x);
        }
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_string(&d("5/8")).unwrap();
        assert_eq!(v, r#"{"num":5,"exp":3}"#);
        let back: Dyadic = serde_json::from_str(&v).unwrap();
        assert_eq!(back, d("5/8"));
        assert!(serde_json::from_str::<Dyadic>(r#"{"num":4,"exp":3}"#).is_err());
    }
}
