//! Exact real numbers of the form `Σ q_d · √d` with rational `q_d` and
//! distinct squarefree radicands `d`.
//!
//! Square roots of distinct squarefree integers are linearly independent over
//! the rationals, so the representation is canonical: two surds are equal
//! exactly when their coefficient maps are equal. This is what lets the
//! classifiers decide commensurability questions without floating point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::Interval;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    // radicand -> coefficient; radicand 1 holds the rational part.
    parts: BTreeMap<u64, BigRational>,
}

/// Writes `n = s^2 * r` with `r` squarefree and returns `(s, r)`.
fn square_split(mut n: u64) -> (u64, u64) {
    let (mut s, mut r) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n && p <= 1_000_000 {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let q = n.sqrt();
        if q * q == n {
            s *= q;
        } else {
            r *= n;
        }
    }
    (s, r)
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(n.into(), d.into()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut parts = BTreeMap::new();
        if !r.is_zero() {
            parts.insert(1, r);
        }
        Surd { parts }
    }

    /// `q · √d` for any positive integer `d`.
    pub fn root_term(q: BigRational, d: u64) -> Self {
        assert!(d >= 1);
        let (s, r) = square_split(d);
        let mut parts = BTreeMap::new();
        let c = q * BigRational::from_integer(s.into());
        if !c.is_zero() {
            parts.insert(r, c);
        }
        Surd { parts }
    }

    /// `√d`.
    pub fn sqrt_of(d: u64) -> Self {
        Self::root_term(BigRational::one(), d)
    }

    /// Square root of a nonnegative rational, or `None` if `r < 0` or the
    /// radicand does not fit in 64 bits.
    pub fn sqrt_rational(r: &BigRational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Self::zero());
        }
        // sqrt(p/q) = sqrt(p q) / q
        let pq = (r.numer() * r.denom()).to_u64()?;
        Some(Self::root_term(
            BigRational::new(BigInt::one(), r.denom().clone()),
            pq,
        ))
    }

    /// `√self` when `self` is a nonnegative rational.
    pub fn sqrt(&self) -> Option<Self> {
        self.to_rational().and_then(|r| Self::sqrt_rational(&r))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|r| r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        self.parts.keys().all(|&d| d == 1)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.parts.get(&1).cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn is_integer(&self) -> bool {
        self.to_integer().is_some()
    }

    /// Coefficients by radicand, in increasing radicand order.
    pub fn parts(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.parts.iter().map(|(d, q)| (*d, q))
    }

    fn insert_add(&mut self, d: u64, q: BigRational) {
        let e = self.parts.entry(d).or_insert_with(BigRational::zero);
        *e += q;
        if e.is_zero() {
            self.parts.remove(&d);
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Surd {
            parts: self.parts.iter().map(|(d, c)| (*d, c * q)).collect(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut num = Surd::one();
        let mut den = self.clone();
        // Multiply by conjugates one prime at a time: (A + B√p)(A − B√p) has
        // no radicand divisible by p.
        while !den.is_rational() {
            let d = *den.parts.keys().find(|&&d| d > 1).unwrap();
            let p = smallest_prime_factor(d);
            let conj = Surd {
                parts: den
                    .parts
                    .iter()
                    .map(|(r, c)| (*r, if r % p == 0 { -c.clone() } else { c.clone() }))
                    .collect(),
            };
            num = &num * &conj;
            den = &den * &conj;
        }
        let q = den.to_rational().unwrap();
        Some(num.scale(&q.recip()))
    }

    pub fn div(&self, o: &Surd) -> Option<Self> {
        o.inv().map(|i| self * &i)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Surd::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        let mut acc = Interval::zero(prec);
        for (d, q) in &self.parts {
            let qi = Interval::from_rational(q, prec);
            let term = if *d == 1 {
                qi
            } else {
                qi.mul(&Interval::sqrt_rational(&BigRational::from_integer((*d).into()), prec))
            };
            acc = acc.add(&term);
        }
        acc
    }

    /// Sign as -1, 0 or 1, decided exactly.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.to_rational() {
            return if r.is_positive() { 1 } else { -1 };
        }
        let mut prec = 64;
        loop {
            let iv = self.to_interval(prec);
            if iv.is_positive() {
                return 1;
            }
            if iv.is_negative() {
                return -1;
            }
            prec *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.to_rational() {
            return r.floor().to_integer();
        }
        // Irrational values are never integers, so some precision separates
        // the value from its neighbouring integers.
        let mut prec = 64;
        loop {
            if let Some(f) = self.to_interval(prec).floor() {
                return f;
            }
            prec *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.parts
            .iter()
            .map(|(d, q)| q.to_f64().unwrap_or(f64::NAN) * (*d as f64).sqrt())
            .sum()
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Surd {
    fn from(v: i64) -> Self {
        Surd::from_i64(v)
    }
}

impl From<BigRational> for Surd {
    fn from(r: BigRational) -> Self {
        Surd::from_rational(r)
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        let mut r = self.clone();
        for (d, q) in &o.parts {
            r.insert_add(*d, q.clone());
        }
        r
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, o: &Surd) -> Surd {
        let mut r = self.clone();
        for (d, q) in &o.parts {
            r.insert_add(*d, -q.clone());
        }
        r
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        let mut r = Surd::zero();
        for (a, p) in &self.parts {
            for (b, q) in &o.parts {
                let g = a.gcd(b);
                let d = (a / g) * (b / g);
                r.insert_add(d, p * q * BigRational::from_integer(g.into()));
            }
        }
        r
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            parts: self.parts.iter().map(|(d, q)| (*d, -q.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Surd {
            type Output = Surd;
            fn $m(self, o: Surd) -> Surd {
                (&self).$m(&o)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $m(self, o: &Surd) -> Surd {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::zero()
    }
    fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::one()
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders as a sum such as `3/2 + 2*sqrt(5)`, parseable by the expression
/// grammar.
impl serde::Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Rational part first, then radicals in increasing order.
        for (i, (d, q)) in self.parts.iter().enumerate() {
            let neg = q.is_negative();
            let a = q.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            match (*d, a.is_one()) {
                (1, _) => write!(f, "{}", fmt_rational(&a))?,
                (d, true) => write!(f, "sqrt({d})")?,
                (d, false) => write!(f, "{}*sqrt({d})", fmt_rational(&a))?,
            }
        }
        Ok(())
    }
}
