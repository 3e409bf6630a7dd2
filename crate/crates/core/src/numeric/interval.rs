//! Dyadic interval arithmetic with outward rounding.
//!
//! An [`Interval`] holds integer endpoints `lo <= hi` at a fixed binary
//! precision `prec`, standing for the closed real interval
//! `[lo / 2^prec, hi / 2^prec]`. Every operation returns an interval that
//! contains the exact result for every choice of arguments in the inputs.
//! Transcendental functions (`ln`, `exp`) are evaluated with series whose
//! truncation and rounding errors are bounded explicitly and folded into the
//! endpoints.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Extra bits carried internally by the series evaluations.
const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn floor_shr(x: &BigInt, k: u32) -> BigInt {
    x.div_floor(&pow2(k))
}

fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    -((-x).div_floor(&pow2(k)))
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        let x = v << prec as usize;
        Interval { lo: x.clone(), hi: x, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(v), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let scaled = r.numer() << prec as usize;
        let lo = scaled.div_floor(r.denom());
        let hi = ceil_div(&scaled, r.denom());
        Interval { lo, hi, prec }
    }

    /// Enclosure of `sqrt(r)` for a nonnegative rational `r`.
    pub fn sqrt_rational(r: &BigRational, prec: u32) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        let scaled = r.numer() << (2 * prec) as usize;
        let x_lo = scaled.div_floor(r.denom());
        let x_hi = ceil_div(&scaled, r.denom());
        let lo = x_lo.sqrt();
        let hi = x_hi.sqrt() + 1;
        Interval { lo, hi, prec }
    }

    /// Enclosure of `n^(p/q)` for a positive integer `n`.
    ///
    /// For `q > 1` the enclosure always has positive width, even when the
    /// power happens to be an integer; exact values are detected
    /// symbolically by the callers.
    pub fn int_power(n: &BigInt, p: i64, q: u32, prec: u32) -> Self {
        assert!(n.is_positive() && q >= 1);
        let base = num_traits::pow(n.clone(), p.unsigned_abs() as usize);
        let pos = if q == 1 {
            Self::from_int(&base, prec)
        } else {
            let scaled = base << (q as usize * prec as usize);
            // Deliberately open on both sides, so that exact integer powers
            // straddle and are left to the symbolic check.
            let r = scaled.nth_root(q);
            Interval { lo: &r - 1, hi: r + 1, prec }
        };
        if p < 0 {
            pos.recip().expect("positive base")
        } else {
            pos
        }
    }

    /// Enclosure of the natural logarithm of a positive integer.
    pub fn ln_int(n: &BigInt, prec: u32) -> Self {
        assert!(n.is_positive(), "logarithm of a nonpositive integer");
        if n.is_one() {
            return Self::zero(prec);
        }
        let w = prec + GUARD_BITS;
        let e = n.bits() - 1;
        let two_e = BigInt::one() << e as usize;
        let (l2lo, l2hi) = ln2_fixed(w);
        let (alo, ahi) = atanh_fixed(&(n - &two_e), &(n + &two_e), w);
        let lo = &l2lo * e + (alo << 1);
        let hi = &l2hi * e + (ahi << 1);
        Interval {
            lo: floor_shr(&lo, GUARD_BITS),
            hi: ceil_shr(&hi, GUARD_BITS),
            prec,
        }
    }

    /// Enclosure of `exp(x)` for every `x` in `self`.
    pub fn exp(&self) -> Self {
        let prec = self.prec;
        let w = prec + GUARD_BITS;
        let (lo, _) = exp_fixed(&(&self.lo << GUARD_BITS as usize), w);
        let (_, hi) = exp_fixed(&(&self.hi << GUARD_BITS as usize), w);
        Interval {
            lo: floor_shr(&lo, GUARD_BITS),
            hi: ceil_shr(&hi, GUARD_BITS),
            prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let min = c.iter().min().unwrap();
        let max = c.iter().max().unwrap();
        Interval {
            lo: floor_shr(min, self.prec),
            hi: ceil_shr(max, self.prec),
            prec: self.prec,
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b, prec: self.prec }
        } else {
            Interval { lo: b, hi: a, prec: self.prec }
        }
    }

    /// `1 / self`, or `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let one = pow2(2 * self.prec);
        Some(Interval {
            lo: one.div_floor(&self.hi),
            hi: ceil_div(&one, &self.lo),
            prec: self.prec,
        })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.recip().map(|r| self.mul(&r))
    }

    pub fn powi(&self, k: i32) -> Option<Self> {
        let mut acc = Self::from_i64(1, self.prec);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(self);
        }
        if k < 0 {
            acc.recip()
        } else {
            Some(acc)
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// The common floor of every point of the interval, if there is one.
    pub fn floor(&self) -> Option<BigInt> {
        let a = floor_shr(&self.lo, self.prec);
        let b = floor_shr(&self.hi, self.prec);
        (a == b).then_some(a)
    }

    /// Width in units of `2^-prec`.
    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn lo_f64(&self) -> f64 {
        scaled_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        scaled_to_f64(&self.hi, self.prec)
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&((&self.lo + &self.hi) >> 1usize), self.prec)
    }

    /// Fractional part of the lower endpoint as a 128-bit fixed-point
    /// fraction. Requires `prec >= 128`.
    pub fn frac_u128(&self) -> u128 {
        assert!(self.prec >= 128);
        let m = floor_shr(&self.lo, self.prec - 128);
        let frac = m.mod_floor(&pow2(128));
        frac.to_u128().expect("reduced modulo 2^128")
    }
}

fn scaled_to_f64(x: &BigInt, prec: u32) -> f64 {
    let shift = prec.saturating_sub(64);
    let m = floor_shr(x, shift);
    m.to_f64().unwrap_or(f64::NAN) / 2f64.powi((prec - shift) as i32)
}

/// Lower and upper bounds, at scale `2^w`, of `atanh(u / v)` for
/// `0 <= u / v <= 1/3`.
fn atanh_fixed(u: &BigInt, v: &BigInt, w: u32) -> (BigInt, BigInt) {
    if u.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    debug_assert!(u * 3 <= *v);
    let z2n = u * u;
    let z2d = v * v;
    let mut pow = (u << w as usize).div_floor(v);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !pow.is_zero() {
        sum += &pow / (2 * k + 1);
        k += 1;
        pow = (pow * &z2n).div_floor(&z2d);
    }
    // Every floor underestimates; the accumulated deficit and the tail are
    // both below 4k + 8 units.
    let hi = &sum + 4 * k + 8;
    (sum, hi)
}

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, (BigInt, BigInt)>> = RefCell::new(HashMap::new());
}

fn ln2_fixed(w: u32) -> (BigInt, BigInt) {
    LN2_CACHE.with(|c| {
        c.borrow_mut()
            .entry(w)
            .or_insert_with(|| {
                let (lo, hi) = atanh_fixed(&BigInt::one(), &BigInt::from(3), w);
                (lo << 1, hi << 1)
            })
            .clone()
    })
}

/// Bounds on `exp(x / 2^w)` at scale `2^w`.
fn exp_fixed(x: &BigInt, w: u32) -> (BigInt, BigInt) {
    let (l2lo, l2hi) = ln2_fixed(w);
    // k = round(x / ln 2); the reduced argument is an interval because ln 2 is.
    let k = (x + (&l2lo >> 1usize)).div_floor(&l2lo);
    let (a, b) = (&k * &l2lo, &k * &l2hi);
    let (kmin, kmax) = if a <= b { (a, b) } else { (b, a) };
    let r_lo = x - kmax;
    let r_hi = x - kmin;
    let lo = taylor_exp(&r_lo, w).0;
    let hi = taylor_exp(&r_hi, w).1;
    let k = k.to_i64().expect("exponent argument out of range");
    if k >= 0 {
        (lo << k as usize, hi << k as usize)
    } else {
        let s = k.unsigned_abs() as u32;
        (floor_shr(&lo, s), ceil_shr(&hi, s))
    }
}

/// Bounds on `exp(r / 2^w)` for `|r / 2^w| < 1/2`.
fn taylor_exp(r: &BigInt, w: u32) -> (BigInt, BigInt) {
    let one = pow2(w);
    let mut sum = one.clone();
    let mut term = one;
    let mut j: u64 = 0;
    loop {
        j += 1;
        term = ((term * r) >> w as usize) / j;
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    let slack = BigInt::from(3 * j + 8);
    (&sum - &slack, &sum + &slack)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn encloses(iv: &Interval, x: f64) -> bool {
        iv.lo_f64() <= x + 1e-15 * x.abs().max(1.0) && x - 1e-15 * x.abs().max(1.0) <= iv.hi_f64()
    }

    #[test]
    fn ln_matches_f64() {
        for n in [2i64, 3, 10, 1000, 999_983, 1 << 40] {
            let iv = Interval::ln_int(&BigInt::from(n), 128);
            assert!(encloses(&iv, (n as f64).ln()), "ln {n}");
            assert!(iv.width_ulps() < BigInt::from(4));
        }
    }

    #[test]
    fn ln_is_tight_at_high_precision() {
        let iv = Interval::ln_int(&BigInt::from(7), 1024);
        assert!(iv.width_ulps() <= BigInt::from(2));
    }

    #[test]
    fn exp_matches_f64() {
        for x in [-3.0, -0.1, 0.0, 0.5, 2.0, 19.5] {
            let p = 128;
            let xi = Interval::from_rational(
                &BigRational::from_float(x).unwrap(),
                p,
            );
            let e = xi.exp();
            assert!(encloses(&e, f64::exp(x)), "exp {x}");
        }
    }

    #[test]
    fn exp_of_ln_is_identity() {
        let n = BigInt::from(12345);
        let e = Interval::ln_int(&n, 256).exp();
        assert!(e.lo_f64() <= 12345.0 && 12345.0 <= e.hi_f64());
        assert!(e.width_ulps() < BigInt::from(1u64 << 40));
    }

    #[test]
    fn roots_and_floors() {
        let iv = Interval::int_power(&BigInt::from(5), 3, 2, 128);
        assert_eq!(iv.floor(), Some(BigInt::from(11)));
        // 4^(3/2) = 8 exactly: the enclosure straddles the integer.
        let iv = Interval::int_power(&BigInt::from(4), 3, 2, 128);
        assert_eq!(iv.floor(), None);
        let iv = Interval::int_power(&BigInt::from(3), 2, 1, 128);
        assert_eq!(iv.floor(), Some(BigInt::from(9)));
        let iv = Interval::int_power(&BigInt::from(4), -1, 2, 128);
        assert!(encloses(&iv, 0.5));
    }

    #[test]
    fn arithmetic_encloses() {
        let p = 96;
        let a = Interval::from_rational(&rat(1, 3), p);
        let b = Interval::sqrt_rational(&rat(5, 1), p);
        assert!(encloses(&a.mul(&b), 5f64.sqrt() / 3.0));
        assert!(encloses(&a.sub(&b), 1.0 / 3.0 - 5f64.sqrt()));
        assert!(encloses(&a.div(&b).unwrap(), 1.0 / 3.0 / 5f64.sqrt()));
        assert!(encloses(&b.neg().recip().unwrap(), -1.0 / 5f64.sqrt()));
        assert!(Interval::zero(p).recip().is_none());
    }

    #[test]
    fn frac_bits() {
        let a = Interval::from_rational(&rat(5, 4), 160);
        assert_eq!(a.frac_u128(), 1u128 << 126);
    }
}
