//! Exact rational scalar.
//!
//! [`Ratio`] wraps an arbitrary-precision rational kept in canonical
//! reduced form (positive denominator, gcd 1). The text form is `"p/q"`
//! for non-integers and `"n"` for integers; parsing accepts both. Every
//! operation is exact; nothing in the crate ever rounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(BigRational);

impl Ratio {
    pub fn zero() -> Self {
        Ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Ratio(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Ratio(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Ratio(BigRational::from_integer(n))
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Ratio(BigRational::from_integer(BigInt::from(n.clone())))
    }

    /// Exact `p/q`; panics if `q == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "denominator must be nonzero");
        Ratio(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::Schema("rational with zero denominator".into()));
        }
        Ok(Ratio(BigRational::new(numer, denom)))
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Schema("reciprocal of zero".into()));
        }
        Ok(Ratio(self.0.recip()))
    }

    /// Exact integer power; `k` may be negative for nonzero values.
    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Ratio::one();
        }
        assert!(
            !self.is_zero() || k > 0,
            "negative power of zero is undefined"
        );
        let e = u32::try_from(k.unsigned_abs()).expect("exponent out of range");
        let n = num_traits::pow(self.0.numer().clone(), e as usize);
        let d = num_traits::pow(self.0.denom().clone(), e as usize);
        if k > 0 {
            Ratio(BigRational::new(n, d))
        } else {
            Ratio(BigRational::new(d, n))
        }
    }

    /// Exact square root when both numerator and denominator are perfect
    /// squares; `None` otherwise (including all negative inputs).
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.0.numer().sqrt();
        let d = self.0.denom().sqrt();
        if &(&n * &n) == self.0.numer() && &(&d * &d) == self.0.denom() {
            Some(Ratio(BigRational::new(n, d)))
        } else {
            None
        }
    }

    /// Compare against 1 without allocating.
    pub fn cmp_one(&self) -> Ordering {
        self.0.numer().cmp(self.0.denom())
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Schema(format!("malformed rational {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Ratio(BigRational::new(p, q)))
            }
            None => {
                let p: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Ratio(BigRational::from_integer(p)))
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                Ratio((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Ratio> for &Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &'a Ratio) -> Ratio {
                Ratio((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio(-self.0)
    }
}

impl Neg for &Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio(-&self.0)
    }
}

impl std::iter::Sum for Ratio {
    fn sum<I: Iterator<Item = Ratio>>(iter: I) -> Ratio {
        iter.fold(Ratio::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "1", "-3", "4/5", "-7/12", "25/4"] {
            let r: Ratio = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
    }

    #[test]
    fn parse_reduces_to_canonical_form() {
        let r: Ratio = "6/4".parse().unwrap();
        assert_eq!(r.to_string(), "3/2");
        let r: Ratio = "5/-10".parse().unwrap();
        assert_eq!(r.to_string(), "-1/2");
    }

    #[test]
    fn rejects_malformed_input() {
        for s in ["", "1/0", "a/b", "1/2/3", "1.5"] {
            assert!(s.parse::<Ratio>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn integer_powers() {
        let q = Ratio::new(1, 2);
        assert_eq!(q.pow(3), Ratio::new(1, 8));
        assert_eq!(q.pow(-2), Ratio::from_int(4));
        assert_eq!(q.pow(0), Ratio::one());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(
            "25/4".parse::<Ratio>().unwrap().sqrt_exact(),
            Some(Ratio::new(5, 2))
        );
        assert_eq!("9/2".parse::<Ratio>().unwrap().sqrt_exact(), None);
        assert_eq!("-4".parse::<Ratio>().unwrap().sqrt_exact(), None);
        assert_eq!(Ratio::zero().sqrt_exact(), Some(Ratio::zero()));
    }
}
