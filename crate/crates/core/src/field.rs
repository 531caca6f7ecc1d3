//! Exact scalar fields.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

/// An exact field usable for rank and kernel computations.
pub trait Field:
    Num + Neg<Output = Self> + Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Zero for the rationals, `p` for the prime field of order `p`.
    const CHARACTERISTIC: u64;

    fn from_i64(n: i64) -> Self;

    /// All elements, when the field is small enough to list.
    fn elements() -> Option<Vec<Self>> {
        None
    }
}

pub type Rational = BigRational;

impl Field for BigRational {
    const CHARACTERISTIC: u64 = 0;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// The prime field of order `P`. `P` must be prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(value: u64) -> Self {
        Fp(value % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 + rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 + P as u128 - rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "division by zero in F_{P}");
        self * rhs.pow(P - 2)
    }
}

impl<const P: u64> Rem for Fp<P> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "division by zero in F_{P}");
        Fp(0)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Num for Fp<P> {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        u64::from_str_radix(s, radix).map(Fp::new)
    }
}

impl<const P: u64> Field for Fp<P> {
    const CHARACTERISTIC: u64 = P;

    fn from_i64(n: i64) -> Self {
        Fp(n.rem_euclid(P as i64) as u64)
    }

    fn elements() -> Option<Vec<Self>> {
        if P <= 1 << 16 {
            Some((0..P).map(Fp).collect())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F7 = Fp<7>;

    #[test]
    fn prime_field_arithmetic() {
        let a = F7::new(3);
        let b = F7::new(5);
        assert_eq!(a + b, F7::new(1));
        assert_eq!(a - b, F7::new(5));
        assert_eq!(a * b, F7::new(1));
        assert_eq!(a / b * b, a);
        assert_eq!(-a + a, F7::zero());
        assert_eq!(F7::from_i64(-1), F7::new(6));
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for x in F7::elements().unwrap().into_iter().skip(1) {
            assert_eq!(x * (F7::one() / x), F7::one());
        }
    }

    #[test]
    fn rationals_display_exactly() {
        let h = Rational::from_i64(1) / Rational::from_i64(2);
        assert_eq!(h.to_string(), "1/2");
        assert_eq!(Rational::from_i64(-3).to_string(), "-3");
    }
}
