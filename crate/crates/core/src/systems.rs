//! Explicit measure-preserving systems, points and observables.
//!
//! Torus coordinates are [`Phase`] values, so rotations and affine maps are
//! computed exactly modulo 2^-128 and their closed-form iterates compose bit
//! for bit. Heisenberg coordinates carry an integer part alongside the
//! 128-bit fraction until they are reduced to the fundamental domain.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::phase::mul_hi;
use crate::numeric::{Phase, Surd};

/// A real number as an integer part plus a 128-bit binary fraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Lifted {
    pub int: i128,
    pub frac: Phase,
}

impl Lifted {
    pub fn from_surd(s: &Surd) -> Self {
        let int = s.floor().to_i128().expect("integer part out of range");
        Lifted { int, frac: Phase::from_surd(s) }
    }

    pub fn from_f64(x: f64) -> Self {
        Lifted { int: x.floor() as i128, frac: Phase::from_f64(x) }
    }

    pub fn from_phase(p: Phase) -> Self {
        Lifted { int: 0, frac: p }
    }

    pub fn to_f64(self) -> f64 {
        self.int as f64 + self.frac.to_f64()
    }

    pub fn add(self, o: Lifted) -> Lifted {
        let (frac, carry) = self.frac.overflowing_add(o.frac);
        Lifted { int: self.int + o.int + carry as i128, frac }
    }

    pub fn neg(self) -> Lifted {
        if self.frac.0 == 0 {
            Lifted { int: -self.int, frac: Phase::ZERO }
        } else {
            Lifted { int: -self.int - 1, frac: -self.frac }
        }
    }

    pub fn sub(self, o: Lifted) -> Lifted {
        self.add(o.neg())
    }

    /// Exact product with an integer.
    pub fn mul_int(self, k: i128) -> Lifted {
        let a = k.unsigned_abs();
        let hi = mul_hi(self.frac.0, a) as i128;
        let lo = self.frac.0.wrapping_mul(a);
        let pos = Lifted { int: self.int * a as i128 + hi, frac: Phase(lo) };
        if k < 0 {
            pos.neg()
        } else {
            pos
        }
    }

    /// Product, with the fraction-times-fraction part truncated to 128 bits.
    pub fn mul(self, o: Lifted) -> Lifted {
        let ab = Lifted { int: self.int * o.int, frac: Phase::ZERO };
        let ag = Lifted::from_phase(o.frac).mul_int(self.int);
        let bf = Lifted::from_phase(self.frac).mul_int(o.int);
        let fg = Lifted::from_phase(self.frac.mul_frac(o.frac));
        ab.add(ag).add(bf).add(fg)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum System {
    TorusRotation { alpha: Vec<Surd>, phase: Vec<Phase> },
    AffineTorus(AffineTorus),
    Heisenberg(Heisenberg),
    FiniteCyclic { m: u64 },
    Product(Vec<System>),
}

/// `x ↦ S x + b` on the `d`-torus with `S` unipotent.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineTorus {
    pub s: Vec<Vec<i64>>,
    pub b: Vec<Surd>,
    b_phase: Vec<Phase>,
    /// Powers `N^k`, `N = S − I`, for `k = 0..d` (the last is zero).
    npow: Vec<Vec<Vec<i128>>>,
}

/// Left translation by `(β1, β2, β3)` on the Heisenberg nilmanifold with
/// group law `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y')`.
#[derive(Clone, Debug, PartialEq)]
pub struct Heisenberg {
    pub beta: [Surd; 3],
    lifted: [Lifted; 3],
    beta12: Lifted,
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

impl System {
    pub fn rotation(alpha: Vec<Surd>) -> Self {
        let phase = alpha.iter().map(Phase::from_surd).collect();
        System::TorusRotation { alpha, phase }
    }

    pub fn affine(s: Vec<Vec<i64>>, b: Vec<Surd>) -> Result<Self> {
        let d = b.len();
        if s.len() != d || s.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch(format!("matrix must be {d}x{d}")));
        }
        let n: Vec<Vec<i128>> = (0..d)
            .map(|i| (0..d).map(|j| s[i][j] as i128 - (i == j) as i128).collect())
            .collect();
        let ident: Vec<Vec<i128>> =
            (0..d).map(|i| (0..d).map(|j| (i == j) as i128).collect()).collect();
        let mut npow = vec![ident];
        for _ in 0..d {
            let next = mat_mul(npow.last().unwrap(), &n);
            npow.push(next);
        }
        if npow[d].iter().flatten().any(|&v| v != 0) {
            return Err(Error::Precondition("matrix is not unipotent".into()));
        }
        let b_phase = b.iter().map(Phase::from_surd).collect();
        Ok(System::AffineTorus(AffineTorus { s, b, b_phase, npow }))
    }

    pub fn heisenberg(beta: [Surd; 3]) -> Self {
        let lifted = [
            Lifted::from_surd(&beta[0]),
            Lifted::from_surd(&beta[1]),
            Lifted::from_surd(&beta[2]),
        ];
        let beta12 = Lifted::from_surd(&(&beta[0] * &beta[1]));
        System::Heisenberg(Heisenberg { beta, lifted, beta12 })
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("modulus must be at least 1".into()));
        }
        Ok(System::FiniteCyclic { m })
    }

    /// Number of real or residue coordinates of a point.
    pub fn dim(&self) -> usize {
        match self {
            System::TorusRotation { alpha, .. } => alpha.len(),
            System::AffineTorus(a) => a.b.len(),
            System::Heisenberg(_) => 3,
            System::FiniteCyclic { .. } => 1,
            System::Product(parts) => parts.iter().map(System::dim).sum(),
        }
    }

    pub fn origin(&self) -> Point {
        match self {
            System::TorusRotation { alpha, .. } => Point::Torus(vec![Phase::ZERO; alpha.len()]),
            System::AffineTorus(a) => Point::Torus(vec![Phase::ZERO; a.b.len()]),
            System::Heisenberg(_) => Point::Heisenberg([Phase::ZERO; 3]),
            System::FiniteCyclic { .. } => Point::Cyclic(0),
            System::Product(parts) => Point::Product(parts.iter().map(System::origin).collect()),
        }
    }

    /// Whether `x` is a point of this system.
    pub fn accepts(&self, x: &Point) -> bool {
        match (self, x) {
            (System::TorusRotation { alpha, .. }, Point::Torus(v)) => v.len() == alpha.len(),
            (System::AffineTorus(a), Point::Torus(v)) => v.len() == a.b.len(),
            (System::Heisenberg(_), Point::Heisenberg(_)) => true,
            (System::FiniteCyclic { m }, Point::Cyclic(v)) => v < m,
            (System::Product(ps), Point::Product(xs)) => {
                ps.len() == xs.len() && ps.iter().zip(xs).all(|(p, x)| p.accepts(x))
            }
            _ => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            System::TorusRotation { alpha, .. } => {
                let a: Vec<String> = alpha.iter().map(|x| x.to_string()).collect();
                format!("rotation({})", a.join(", "))
            }
            System::AffineTorus(a) => format!("affine(S={:?}, b=[{}])", a.s, join(&a.b)),
            System::Heisenberg(h) => format!("heisenberg({})", join(&h.beta)),
            System::FiniteCyclic { m } => format!("cyclic({m})"),
            System::Product(ps) => {
                ps.iter().map(System::name).collect::<Vec<_>>().join(" x ")
            }
        }
    }
}

fn join(v: &[Surd]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// `C(n, k) mod 2^128` for any integer `n`.
pub(crate) fn binomial_mod(n: i64, k: usize) -> u128 {
    let mut acc: Option<i128> = Some(1);
    for i in 0..k as i64 {
        acc = acc.and_then(|a| a.checked_mul((n - i) as i128)).map(|a| a / (i as i128 + 1));
    }
    if let Some(a) = acc {
        return a as u128;
    }
    let mut big = BigInt::from(1);
    for i in 0..k as i64 {
        big = big * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    let m = BigInt::from(1u8) << 128usize;
    let r = ((big % &m) + &m) % &m;
    r.to_u128().unwrap()
}

impl AffineTorus {
    pub fn d(&self) -> usize {
        self.b.len()
    }

    /// Integer matrix `(S − I)^k`.
    pub fn n_power(&self, k: usize) -> &[Vec<i128>] {
        &self.npow[k.min(self.d())]
    }

    fn apply_npow(&self, k: usize, v: &[Phase]) -> Vec<Phase> {
        let m = &self.npow[k];
        m.iter()
            .map(|row| row.iter().zip(v).map(|(c, x)| x.mul_i128(*c)).sum())
            .collect()
    }

    /// `T^n x = Σ_k C(n,k) N^k x + Σ_k C(n,k+1) N^k b`.
    pub fn iterate(&self, x: &[Phase], n: i64) -> Vec<Phase> {
        let d = self.d();
        let mut out = vec![Phase::ZERO; d];
        for k in 0..d {
            let cx = binomial_mod(n, k);
            let cb = binomial_mod(n, k + 1);
            let nx = self.apply_npow(k, x);
            let nb = self.apply_npow(k, &self.b_phase);
            for i in 0..d {
                out[i] = out[i] + Phase(nx[i].0.wrapping_mul(cx)) + Phase(nb[i].0.wrapping_mul(cb));
            }
        }
        out
    }

    /// One application of the map.
    pub fn step(&self, x: &[Phase]) -> Vec<Phase> {
        self.s
            .iter()
            .zip(&self.b_phase)
            .map(|(row, b)| row.iter().zip(x).map(|(c, v)| v.mul_i128(*c as i128)).sum::<Phase>() + *b)
            .collect()
    }
}

/// Reduces a Heisenberg element to the fundamental domain `[0,1)^3` by
/// right multiplication with lattice elements: first `x`, then `y` (which
/// changes `z` by `x·b`), then `z`.
pub fn reduce_heisenberg_lifted(x: Lifted, y: Lifted, z: Lifted) -> [Phase; 3] {
    // (x, y, z)(a, b, c) = (x + a, y + b, z + c + x b)
    let xr = x.frac;
    let b = -y.int;
    let z = z.add(Lifted::from_phase(xr).mul_int(b));
    [xr, y.frac, z.frac]
}

/// [`reduce_heisenberg_lifted`] for floating-point input.
pub fn reduce_heisenberg(x: f64, y: f64, z: f64) -> Point {
    Point::Heisenberg(reduce_heisenberg_lifted(
        Lifted::from_f64(x),
        Lifted::from_f64(y),
        Lifted::from_f64(z),
    ))
}

impl Heisenberg {
    /// `b^n · x` with `b^n = (nβ1, nβ2, nβ3 + C(n,2) β1 β2)`.
    pub fn iterate(&self, p: &[Phase; 3], n: i64) -> [Phase; 3] {
        let n = n as i128;
        let c2 = n * (n - 1) / 2;
        let bx = self.lifted[0].mul_int(n);
        let by = self.lifted[1].mul_int(n);
        let bz = self.lifted[2].mul_int(n).add(self.beta12.mul_int(c2));
        // (bx, by, bz)(x, y, z) = (bx + x, by + y, bz + z + bx·y)
        let x = bx.add(Lifted::from_phase(p[0]));
        let y = by.add(Lifted::from_phase(p[1]));
        let z = bz.add(Lifted::from_phase(p[2])).add(bx.mul(Lifted::from_phase(p[1])));
        reduce_heisenberg_lifted(x, y, z)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Torus(Vec<Phase>),
    Heisenberg([Phase; 3]),
    Cyclic(u64),
    Product(Vec<Point>),
}

impl Point {
    pub fn torus_f64(coords: &[f64]) -> Self {
        Point::Torus(coords.iter().map(|&c| Phase::from_f64(c)).collect())
    }

    /// Coordinates as floating-point numbers (residues as integers).
    pub fn coords_f64(&self) -> Vec<f64> {
        match self {
            Point::Torus(v) => v.iter().map(|p| p.to_f64()).collect(),
            Point::Heisenberg(v) => v.iter().map(|p| p.to_f64()).collect(),
            Point::Cyclic(r) => vec![*r as f64],
            Point::Product(ps) => ps.iter().flat_map(Point::coords_f64).collect(),
        }
    }
}

/// `T^n x`, in closed form.
pub fn iterate(system: &System, x: &Point, n: i64) -> Result<Point> {
    Ok(match (system, x) {
        (System::TorusRotation { phase, .. }, Point::Torus(v)) if v.len() == phase.len() => {
            Point::Torus(v.iter().zip(phase).map(|(x, a)| *x + a.mul_i128(n as i128)).collect())
        }
        (System::AffineTorus(a), Point::Torus(v)) if v.len() == a.d() => {
            Point::Torus(a.iterate(v, n))
        }
        (System::Heisenberg(h), Point::Heisenberg(p)) => Point::Heisenberg(h.iterate(p, n)),
        (System::FiniteCyclic { m }, Point::Cyclic(r)) if r < m => {
            let m = *m as i128;
            Point::Cyclic((*r as i128 + n as i128).rem_euclid(m) as u64)
        }
        (System::Product(ps), Point::Product(xs)) if ps.len() == xs.len() => Point::Product(
            ps.iter().zip(xs).map(|(p, x)| iterate(p, x, n)).collect::<Result<_>>()?,
        ),
        _ => return Err(Error::ShapeMismatch(format!("point does not belong to {}", system.name()))),
    })
}

/// Bounded test functions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Observable {
    Constant(#[serde(serialize_with = "ser_complex")] Complex64),
    /// `e(k · x)` on a torus.
    TorusCharacter(Vec<i64>),
    /// `Σ c_j e(k_j · x)` on a torus.
    TrigPolynomial(#[serde(serialize_with = "ser_trig")] Vec<(Complex64, Vec<i64>)>),
    /// A function on `Z/m`.
    FiniteVector(#[serde(serialize_with = "ser_complex_vec")] Vec<Complex64>),
    /// `e(k1 x + k2 y)` on the Heisenberg nilmanifold.
    HeisenbergHorizontalCharacter(i64, i64),
    /// Indicator of a box in the fundamental domain, with edges ramped
    /// linearly over `width`.
    HeisenbergBox { lo: [f64; 3], hi: [f64; 3], width: f64 },
    /// `f_1 ⊗ ... ⊗ f_k` on a product system.
    Tensor(Vec<Observable>),
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

fn ser_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

fn ser_trig<S: serde::Serializer>(
    v: &[(Complex64, Vec<i64>)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(c, k)| ([c.re, c.im], k.clone())))
}

fn ramp(u: f64, lo: f64, hi: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return if lo <= u && u < hi { 1.0 } else { 0.0 };
    }
    ((u - lo).min(hi - u) / w).clamp(0.0, 1.0)
}

fn character(k: &[i64], v: &[Phase]) -> Phase {
    k.iter().zip(v).map(|(k, x)| x.mul_i128(*k as i128)).sum()
}

impl Observable {
    pub fn sup_norm(&self) -> f64 {
        match self {
            Observable::Constant(c) => c.norm(),
            Observable::TorusCharacter(_) | Observable::HeisenbergHorizontalCharacter(..) => 1.0,
            Observable::TrigPolynomial(ts) => ts.iter().map(|(c, _)| c.norm()).sum(),
            Observable::FiniteVector(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Observable::HeisenbergBox { .. } => 1.0,
            Observable::Tensor(fs) => fs.iter().map(Observable::sup_norm).product(),
        }
    }

    /// Space average when it is known exactly.
    pub fn mean(&self) -> Option<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Observable::Constant(c) => Some(*c),
            Observable::TorusCharacter(k) => {
                Some(if k.iter().all(|&x| x == 0) { Complex64::new(1.0, 0.0) } else { zero })
            }
            Observable::TrigPolynomial(ts) => Some(
                ts.iter().filter(|(_, k)| k.iter().all(|&x| x == 0)).map(|(c, _)| *c).sum(),
            ),
            Observable::FiniteVector(v) => {
                Some(v.iter().sum::<Complex64>() / v.len().max(1) as f64)
            }
            Observable::HeisenbergHorizontalCharacter(a, b) => {
                Some(if *a == 0 && *b == 0 { Complex64::new(1.0, 0.0) } else { zero })
            }
            Observable::HeisenbergBox { lo, hi, width } if *width <= 0.0 => {
                Some(Complex64::new((0..3).map(|i| (hi[i] - lo[i]).max(0.0)).product(), 0.0))
            }
            Observable::HeisenbergBox { .. } => None,
            Observable::Tensor(fs) => fs.iter().map(Observable::mean).product(),
        }
    }

    pub fn conj(&self) -> Observable {
        match self {
            Observable::Constant(c) => Observable::Constant(c.conj()),
            Observable::TorusCharacter(k) => {
                Observable::TorusCharacter(k.iter().map(|x| -x).collect())
            }
            Observable::TrigPolynomial(ts) => Observable::TrigPolynomial(
                ts.iter().map(|(c, k)| (c.conj(), k.iter().map(|x| -x).collect())).collect(),
            ),
            Observable::FiniteVector(v) => Observable::FiniteVector(v.iter().map(|z| z.conj()).collect()),
            Observable::HeisenbergHorizontalCharacter(a, b) => {
                Observable::HeisenbergHorizontalCharacter(-a, -b)
            }
            Observable::HeisenbergBox { .. } => self.clone(),
            Observable::Tensor(fs) => Observable::Tensor(fs.iter().map(Observable::conj).collect()),
        }
    }
}

/// `f(x)`.
pub fn evaluate(obs: &Observable, x: &Point) -> Result<Complex64> {
    let mismatch = || Error::ShapeMismatch(format!("{obs:?} cannot be evaluated at {x:?}"));
    Ok(match (obs, x) {
        (Observable::Constant(c), _) => *c,
        (Observable::TorusCharacter(k), Point::Torus(v)) if k.len() == v.len() => {
            character(k, v).e()
        }
        (Observable::TrigPolynomial(ts), Point::Torus(v)) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, k) in ts {
                if k.len() != v.len() {
                    return Err(mismatch());
                }
                acc += c * character(k, v).e();
            }
            acc
        }
        (Observable::FiniteVector(vals), Point::Cyclic(r)) => {
            *vals.get(*r as usize).ok_or_else(mismatch)?
        }
        (Observable::HeisenbergHorizontalCharacter(a, b), Point::Heisenberg(p)) => {
            (p[0].mul_i128(*a as i128) + p[1].mul_i128(*b as i128)).e()
        }
        (Observable::HeisenbergBox { lo, hi, width }, Point::Heisenberg(p)) => Complex64::new(
            (0..3).map(|i| ramp(p[i].to_f64(), lo[i], hi[i], *width)).product(),
            0.0,
        ),
        (Observable::Tensor(fs), Point::Product(xs)) if fs.len() == xs.len() => {
            let mut acc = Complex64::new(1.0, 0.0);
            for (f, x) in fs.iter().zip(xs) {
                acc *= evaluate(f, x)?;
            }
            acc
        }
        _ => return Err(mismatch()),
    })
}

/// Checks that `obs` can be evaluated on points of `system`.
pub fn check_shape(system: &System, obs: &Observable) -> Result<()> {
    evaluate(obs, &system.origin()).map(|_| ())
}

/// Radical inverse of `i` in base `b`, as an exact fraction `(num, den)`.
fn radical_inverse(mut i: u64, b: u64) -> (u64, u64) {
    let (mut num, mut den) = (0u64, 1u64);
    while i > 0 {
        num = num * b + i % b;
        den *= b;
        i /= b;
    }
    // Digits were accumulated in reverse order already.
    (num, den)
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn halton(i: u64, dim: usize) -> Phase {
    let (n, d) = radical_inverse(i, PRIMES[dim % PRIMES.len()]);
    Phase::from_ratio(n as i64, d as i64)
}

fn point_from_halton(system: &System, i: u64, dim0: &mut usize) -> Point {
    let mut next = || {
        let p = halton(i, *dim0);
        *dim0 += 1;
        p
    };
    match system {
        System::TorusRotation { alpha, .. } => Point::Torus((0..alpha.len()).map(|_| next()).collect()),
        System::AffineTorus(a) => Point::Torus((0..a.d()).map(|_| next()).collect()),
        System::Heisenberg(_) => Point::Heisenberg([next(), next(), next()]),
        System::FiniteCyclic { m } => {
            let u = next();
            Point::Cyclic(mul_hi(u.0, *m as u128) as u64)
        }
        System::Product(ps) => {
            Point::Product(ps.iter().map(|p| point_from_halton(p, i, dim0)).collect())
        }
    }
}

/// A deterministic low-discrepancy set of `count` points. A finite cyclic
/// system with at most `count` points returns all of them.
pub fn grid(system: &System, count: usize) -> Vec<Point> {
    if let System::FiniteCyclic { m } = system {
        if *m as usize <= count {
            return (0..*m).map(Point::Cyclic).collect();
        }
    }
    (0..count as u64).map(|i| point_from_halton(system, i, &mut 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Surd {
        Surd::from_ratio(n, d)
    }

    fn golden() -> Surd {
        (Surd::sqrt_of(5) - Surd::one()) * Surd::from_ratio(1, 2)
    }

    #[test]
    fn rotation_example() {
        let s = System::rotation(vec![r(1, 4)]);
        let p = iterate(&s, &Point::Torus(vec![Phase::ZERO]), 3).unwrap();
        assert_eq!(p, Point::Torus(vec![Phase::from_ratio(3, 4)]));
    }

    fn footnote(alpha: Surd) -> System {
        System::affine(vec![vec![1, 0], vec![2, 1]], vec![alpha.clone(), alpha]).unwrap()
    }

    #[test]
    fn affine_example() {
        let s = footnote(r(1, 3));
        let x = Point::Torus(vec![Phase::ZERO, Phase::ZERO]);
        let p = iterate(&s, &x, 2).unwrap();
        let Point::Torus(v) = &p else { unreachable!() };
        // 1/3 is not dyadic, so allow the last bits to differ
        assert!((v[0] - Phase::from_ratio(2, 3)).dist_to_int() < 1e-35);
        assert!((v[1] - Phase::from_ratio(1, 3)).dist_to_int() < 1e-35);
        if let (System::AffineTorus(a), Point::Torus(x)) = (&s, &x) {
            assert_eq!(&a.step(&a.step(x)), v);
        }
    }

    #[test]
    fn affine_closed_form_matches_steps() {
        let s = System::affine(
            vec![vec![1, 0, 0], vec![3, 1, 0], vec![-2, 5, 1]],
            vec![golden(), r(1, 7), Surd::sqrt_of(2)],
        )
        .unwrap();
        let System::AffineTorus(a) = &s else { unreachable!() };
        let mut x = vec![Phase::from_ratio(1, 3), Phase::from_f64(0.123), Phase::ZERO];
        let x0 = x.clone();
        for n in 1..=40 {
            x = a.step(&x);
            assert_eq!(a.iterate(&x0, n), x);
        }
        assert_eq!(a.iterate(&a.iterate(&x0, -17), 17), x0);
    }

    #[test]
    fn non_unipotent_rejected() {
        assert!(System::affine(vec![vec![2, 0], vec![0, 1]], vec![r(0, 1), r(0, 1)]).is_err());
    }

    #[test]
    fn heisenberg_reduction_examples() {
        let close = |p: Point, e: [f64; 3]| {
            let c = p.coords_f64();
            (0..3).all(|i| (c[i] - e[i]).abs() < 1e-15)
        };
        assert!(close(reduce_heisenberg(0.0, 0.0, 0.0), [0.0, 0.0, 0.0]));
        assert!(close(reduce_heisenberg(1.5, 0.25, 0.75), [0.5, 0.25, 0.75]));
        assert!(close(reduce_heisenberg(0.5, 1.25, 0.3), [0.5, 0.25, 0.8]));
    }

    #[test]
    fn heisenberg_two_steps() {
        let (b1, b2) = (0.3f64, 0.45f64);
        let s = System::heisenberg([Surd::from_ratio(3, 10), Surd::from_ratio(9, 20), Surd::zero()]);
        let p = iterate(&s, &Point::Heisenberg([Phase::ZERO; 3]), 2).unwrap();
        let expect = reduce_heisenberg(2.0 * b1, 2.0 * b2, b1 * b2);
        let (a, b) = (p.coords_f64(), expect.coords_f64());
        assert!((0..3).all(|i| (a[i] - b[i]).abs() < 1e-12));
    }

    #[test]
    fn lifted_arithmetic() {
        let a = Lifted::from_f64(2.75);
        assert!((a.mul_int(-3).to_f64() + 8.25).abs() < 1e-15);
        assert!((a.neg().to_f64() + 2.75).abs() < 1e-15);
        assert!((a.mul(Lifted::from_f64(-1.5)).to_f64() + 4.125).abs() < 1e-12);
    }

    #[test]
    fn cyclic_and_product() {
        let s = System::Product(vec![System::cyclic(5).unwrap(), System::rotation(vec![r(1, 2)])]);
        let x = Point::Product(vec![Point::Cyclic(4), Point::Torus(vec![Phase::ZERO])]);
        let p = iterate(&s, &x, -3).unwrap();
        assert_eq!(p, Point::Product(vec![Point::Cyclic(1), Point::Torus(vec![Phase::HALF])]));
        assert!(iterate(&s, &Point::Cyclic(0), 1).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let i = evaluate(&Observable::TorusCharacter(vec![1]), &Point::Torus(vec![Phase::from_ratio(1, 4)]))
            .unwrap();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let f = Observable::FiniteVector(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert_eq!(evaluate(&f, &Point::Cyclic(1)).unwrap(), Complex64::new(-1.0, 0.0));
        let h = Observable::HeisenbergHorizontalCharacter(1, 0);
        let v = evaluate(&h, &Point::Heisenberg([Phase::HALF, Phase::from_f64(0.3), Phase::ZERO])).unwrap();
        assert!((v + 1.0).norm() < 1e-15);
        assert!(evaluate(&f, &Point::Cyclic(2)).is_err());
        assert!(evaluate(&h, &Point::Cyclic(0)).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid(&System::cyclic(3).unwrap(), 256).len(), 3);
        let g = grid(&System::rotation(vec![golden(), r(1, 3)]), 64);
        assert_eq!(g.len(), 64);
        assert_eq!(g[1], Point::Torus(vec![Phase::HALF, Phase::from_ratio(1, 3)]));
    }

    #[test]
    fn binomials_mod() {
        assert_eq!(binomial_mod(5, 2), 10);
        assert_eq!(binomial_mod(-3, 2) as i128, 6);
        assert_eq!(binomial_mod(-3, 1) as i128, -3);
        let big = binomial_mod(10_000_000_000_000, 5);
        let expect = {
            let mut b = BigInt::from(1);
            for i in 0..5i64 {
                b = b * BigInt::from(10_000_000_000_000 - i) / BigInt::from(i + 1);
            }
            (b % (BigInt::from(1u8) << 128usize)).to_u128().unwrap()
        };
        assert_eq!(big, expect);
    }
}
