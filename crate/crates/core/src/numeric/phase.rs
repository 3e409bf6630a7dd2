//! Points of the circle `R/Z` stored as 128-bit binary fractions.
//!
//! Addition and multiplication by integers are exact modulo 2^128, so closed
//! form iterates and step-by-step iterates agree bit for bit.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::surd::Surd;

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(pub u128);

fn modulus() -> BigInt {
    BigInt::from(1u8) << 128usize
}

fn big_to_u128(x: &BigInt) -> u128 {
    x.mod_floor(&modulus()).to_u128().expect("reduced modulo 2^128")
}

impl Phase {
    pub const ZERO: Phase = Phase(0);
    pub const HALF: Phase = Phase(1 << 127);

    pub fn from_f64(x: f64) -> Self {
        let f = x - x.floor();
        // f < 1, so f * 2^128 fits after truncation.
        let scaled = f * TWO_POW_128;
        if scaled >= TWO_POW_128 {
            Phase(0)
        } else {
            Phase(scaled as u128)
        }
    }

    /// Nearest representable point at or below `r mod 1`.
    pub fn from_rational(r: &BigRational) -> Self {
        let scaled = (r.numer() << 128usize).div_floor(r.denom());
        Phase(big_to_u128(&scaled))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&BigRational::new(n.into(), d.into()))
    }

    /// Fractional part of an exact real, correct to within 2^-127.
    pub fn from_surd(s: &Surd) -> Self {
        if let Some(r) = s.to_rational() {
            return Self::from_rational(&r);
        }
        Phase(s.to_interval(192).frac_u128())
    }

    pub fn to_f64(self) -> f64 {
        (self.0 >> 64) as f64 / 18_446_744_073_709_551_616.0
            + (self.0 as u64) as f64 / TWO_POW_128
    }

    /// Signed representative in `[-1/2, 1/2)`.
    pub fn centered_f64(self) -> f64 {
        let x = self.to_f64();
        if self.0 >= 1 << 127 {
            x - 1.0
        } else {
            x
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_int(self) -> f64 {
        self.centered_f64().abs()
    }

    /// `e(x) = exp(2πi x)`.
    pub fn e(self) -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.centered_f64()).sin_cos();
        Complex64::new(c, s)
    }

    pub fn mul_i128(self, k: i128) -> Self {
        Phase(self.0.wrapping_mul(k as u128))
    }

    pub fn mul_big(self, k: &BigInt) -> Self {
        Phase(self.0.wrapping_mul(big_to_u128(k)))
    }

    /// Sum of the `[0,1)` representatives and whether it reached 1.
    pub fn overflowing_add(self, o: Phase) -> (Phase, bool) {
        let (v, c) = self.0.overflowing_add(o.0);
        (Phase(v), c)
    }

    /// Product of the `[0,1)` representatives, rounded down.
    pub fn mul_frac(self, o: Phase) -> Phase {
        Phase(mul_hi(self.0, o.0))
    }
}

/// High 128 bits of the 256-bit product.
pub(crate) fn mul_hi(a: u128, b: u128) -> u128 {
    let (a1, a0) = (a >> 64, a & u64::MAX as u128);
    let (b1, b0) = (b >> 64, b & u64::MAX as u128);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & u64::MAX as u128) + (p10 & u64::MAX as u128);
    p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64)
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, o: Phase) -> Phase {
        Phase(self.0.wrapping_add(o.0))
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, o: Phase) -> Phase {
        Phase(self.0.wrapping_sub(o.0))
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase(self.0.wrapping_neg())
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Zero for Phase {
    fn zero() -> Self {
        Phase::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rational_arithmetic() {
        let a = Phase::from_ratio(1, 4);
        assert_eq!(a.mul_i128(3), Phase::from_ratio(3, 4));
        assert_eq!(a.mul_i128(-1), Phase::from_ratio(3, 4));
        assert_eq!(a + a + a + a, Phase::ZERO);
        assert_eq!(Phase::from_ratio(-1, 2), Phase::HALF);
    }

    #[test]
    fn characters() {
        let z = Phase::from_ratio(1, 4).e();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((Phase::HALF.e() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn irrational_phase() {
        let s = Surd::root_term(BigRational::from_integer(1.into()), 2);
        let p = Phase::from_surd(&s);
        assert!((p.to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn high_product() {
        assert_eq!(mul_hi(u128::MAX, u128::MAX), u128::MAX - 1);
        assert_eq!(Phase::HALF.mul_frac(Phase::HALF), Phase(1 << 126));
    }
}
