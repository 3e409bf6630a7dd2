//! Uniformity seminorms through the inductive recursion
//! `⦀f⦀_{ℓ+1}^{2^{ℓ+1}} = lim E_n ⦀f̄·T^n f⦀_ℓ^{2^ℓ}`, `⦀f⦀_1 = ‖E(f|I)‖_2`,
//! and a brute-force Gowers norm on `Z/m`.
//!
//! Finite systems are handled exactly: the outer limit is an average over a
//! full period and `E(·|I)` is the average over each orbit. Torus rotations
//! and unipotent affine maps are handled in Fourier space, where `E(·|I)`
//! keeps exactly the frequencies fixed by the map.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, NeumaierSum, Phase, Surd};
use crate::systems::{AffineTorus, Observable, System};

/// Largest `m^{ℓ+1}·2^ℓ` the brute force accepts.
pub const BRUTE_FORCE_BUDGET: u64 = 1 << 27;
/// Default truncation of the outer averages for infinite systems.
pub const DEFAULT_TRUNCATION: u64 = 256;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Method {
    BruteForce,
    /// Exact recursion on a finite system; outer averages over `period`.
    RecursiveExact { period: u64 },
    /// Recursion with outer averages truncated at `n_trunc`.
    Recursive { n_trunc: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormResult {
    pub ell: u32,
    pub value: f64,
    pub method: Method,
    /// Difference between truncations at `N` and `N/2`, when truncated.
    pub error: Option<f64>,
}

/// `max(x, 0)^(1/2^ℓ)`.
fn root(x: f64, ell: u32) -> f64 {
    x.max(0.0).powf(1.0 / f64::from(1u32 << ell))
}

/// Gowers `U^ℓ` norm of `f` on `Z/m`, averaging the product over the whole
/// cube `{x + ω·h : ω ∈ {0,1}^ℓ}` for all `x, h_1, …, h_ℓ`.
pub fn gowers_bruteforce(f: &[Complex64], ell: u32) -> Result<SeminormResult> {
    let m = f.len() as u64;
    if m == 0 || ell == 0 {
        return Err(Error::Precondition("need m ≥ 1 and ℓ ≥ 1".into()));
    }
    let cost = m
        .checked_pow(ell + 1)
        .and_then(|c| c.checked_mul(1 << ell))
        .filter(|&c| c <= BRUTE_FORCE_BUDGET);
    if cost.is_none() {
        return Err(Error::BudgetExceeded(format!("m = {m}, ℓ = {ell}")));
    }
    let m = m as usize;
    let cube: Vec<(Vec<usize>, bool)> = (0..1usize << ell)
        .map(|w| {
            let bits: Vec<usize> = (0..ell as usize).filter(|i| w >> i & 1 == 1).collect();
            let conj = bits.len() % 2 == 1;
            (bits, conj)
        })
        .collect();
    let per_x: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|x| {
            let mut sum = ComplexSum::default();
            let mut h = vec![0usize; ell as usize];
            loop {
                let mut prod = Complex64::new(1.0, 0.0);
                for (bits, conj) in &cube {
                    let y = (x + bits.iter().map(|&i| h[i]).sum::<usize>()) % m;
                    prod *= if *conj { f[y].conj() } else { f[y] };
                }
                sum.add(prod);
                // next h in lexicographic order
                let mut i = 0;
                while i < h.len() {
                    h[i] += 1;
                    if h[i] < m {
                        break;
                    }
                    h[i] = 0;
                    i += 1;
                }
                if i == h.len() {
                    break;
                }
            }
            sum.value()
        })
        .collect();
    let total: ComplexSum = per_x.into_iter().collect();
    let avg = total.value().re / (m as f64).powi(ell as i32 + 1);
    Ok(SeminormResult { ell, value: root(avg, ell), method: Method::BruteForce, error: None })
}

/// A finite system as a permutation of its points.
struct FinitePerm {
    step: Vec<usize>,
    period: u64,
    /// Orbit index of each point and the orbit sizes.
    orbit: Vec<usize>,
    orbit_len: Vec<usize>,
}

fn finite_moduli(system: &System, out: &mut Vec<u64>) -> bool {
    match system {
        System::FiniteCyclic { m } => {
            out.push(*m);
            true
        }
        System::Product(ps) => ps.iter().all(|p| finite_moduli(p, out)),
        _ => false,
    }
}

impl FinitePerm {
    fn new(moduli: &[u64]) -> Self {
        let size: usize = moduli.iter().map(|&m| m as usize).product();
        // mixed radix with the first modulus least significant
        let step = (0..size)
            .map(|mut i| {
                let mut out = 0;
                let mut scale = 1;
                for &m in moduli {
                    let m = m as usize;
                    out += ((i % m + 1) % m) * scale;
                    scale *= m;
                    i /= m;
                }
                out
            })
            .collect::<Vec<_>>();
        let period = moduli.iter().fold(1u64, |a, &m| a.lcm(&m));
        let mut orbit = vec![usize::MAX; size];
        let mut orbit_len = Vec::new();
        for s in 0..size {
            if orbit[s] != usize::MAX {
                continue;
            }
            let id = orbit_len.len();
            let (mut x, mut len) = (s, 0);
            while orbit[x] == usize::MAX {
                orbit[x] = id;
                len += 1;
                x = step[x];
            }
            orbit_len.push(len);
        }
        FinitePerm { step, period, orbit, orbit_len }
    }

    fn shift(&self, f: &[Complex64], n: u64) -> Vec<Complex64> {
        // (T^n f)(x) = f(T^n x)
        let mut idx: Vec<usize> = (0..f.len()).collect();
        let mut pw = self.step.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                idx = idx.iter().map(|&i| pw[i]).collect();
            }
            pw = pw.iter().map(|&i| pw[i]).collect();
            k >>= 1;
        }
        idx.iter().map(|&i| f[i]).collect()
    }

    /// `‖E(f|I)‖_2^2` with orbit averages as the conditional expectation.
    fn base(&self, f: &[Complex64]) -> f64 {
        let mut sums = vec![ComplexSum::default(); self.orbit_len.len()];
        for (x, v) in f.iter().enumerate() {
            sums[self.orbit[x]].add(*v);
        }
        let total: NeumaierSum = sums
            .iter()
            .zip(&self.orbit_len)
            .map(|(s, &len)| (s.value() / len as f64).norm_sqr() * len as f64)
            .collect();
        total.value() / f.len() as f64
    }

    /// `⦀f⦀_ℓ^{2^ℓ}`.
    fn level(&self, f: &[Complex64], ell: u32) -> f64 {
        if ell == 1 {
            return self.base(f);
        }
        let terms: NeumaierSum = (0..self.period)
            .map(|n| {
                let g: Vec<Complex64> =
                    f.iter().zip(self.shift(f, n)).map(|(a, b)| a.conj() * b).collect();
                self.level(&g, ell - 1)
            })
            .collect();
        terms.value() / self.period as f64
    }
}

/// Values of `f` at every point of a finite system, in the order used by
/// the permutation model.
fn finite_values(system: &System, f: &Observable) -> Result<Vec<Complex64>> {
    fn go(system: &System, f: &Observable) -> Result<Vec<Complex64>> {
        match (system, f) {
            (_, Observable::Constant(c)) => {
                let mut mods = Vec::new();
                finite_moduli(system, &mut mods);
                Ok(vec![*c; mods.iter().map(|&m| m as usize).product()])
            }
            (System::FiniteCyclic { m }, Observable::FiniteVector(v)) if v.len() == *m as usize => {
                Ok(v.clone())
            }
            (System::Product(ps), Observable::Tensor(fs)) if ps.len() == fs.len() => {
                let parts: Vec<Vec<Complex64>> =
                    ps.iter().zip(fs).map(|(p, f)| go(p, f)).collect::<Result<_>>()?;
                // first factor least significant
                let mut out = vec![Complex64::new(1.0, 0.0)];
                for part in &parts {
                    let mut next = Vec::with_capacity(out.len() * part.len());
                    for v in part {
                        for o in &out {
                            next.push(o * v);
                        }
                    }
                    out = next;
                }
                Ok(out)
            }
            _ => Err(Error::ShapeMismatch(format!("{f:?} on {}", system.name()))),
        }
    }
    go(system, f)
}

/// Fourier coefficients `k ↦ c_k`.
type Fourier = BTreeMap<Vec<i64>, Complex64>;

/// Torus map in Fourier form: `T^n e(k·x) = e(k·b_n) e((S^n)ᵀk · x)`.
struct TorusModel {
    d: usize,
    affine: Option<AffineTorus>,
    alpha: Vec<Surd>,
    phase: Vec<Phase>,
}

impl TorusModel {
    fn from_system(system: &System) -> Option<Self> {
        match system {
            System::TorusRotation { alpha, phase } => Some(TorusModel {
                d: alpha.len(),
                affine: None,
                alpha: alpha.clone(),
                phase: phase.clone(),
            }),
            System::AffineTorus(a) => Some(TorusModel {
                d: a.d(),
                affine: Some(a.clone()),
                alpha: a.b.clone(),
                phase: Vec::new(),
            }),
            System::Product(ps) => {
                let mut alpha = Vec::new();
                let mut phase = Vec::new();
                for p in ps {
                    match p {
                        System::TorusRotation { alpha: a, phase: f } => {
                            alpha.extend(a.iter().cloned());
                            phase.extend(f.iter().copied());
                        }
                        _ => return None,
                    }
                }
                Some(TorusModel { d: alpha.len(), affine: None, alpha, phase })
            }
            _ => None,
        }
    }

    fn coefficients(&self, f: &Observable) -> Result<Fourier> {
        let mut out = Fourier::new();
        let mut push = |k: Vec<i64>, c: Complex64| -> Result<()> {
            if k.len() != self.d {
                return Err(Error::ShapeMismatch(format!("frequency {k:?} in dimension {}", self.d)));
            }
            *out.entry(k).or_default() += c;
            Ok(())
        };
        fn flat(f: &Observable) -> Option<Vec<(Complex64, Vec<i64>)>> {
            match f {
                Observable::Constant(c) => Some(vec![(*c, Vec::new())]),
                Observable::TorusCharacter(k) => Some(vec![(Complex64::new(1.0, 0.0), k.clone())]),
                Observable::TrigPolynomial(ts) => Some(ts.clone()),
                Observable::Tensor(fs) => {
                    let mut acc = vec![(Complex64::new(1.0, 0.0), Vec::new())];
                    for g in fs {
                        let part = flat(g)?;
                        acc = acc
                            .iter()
                            .flat_map(|(c, k)| {
                                part.iter().map(move |(c2, k2)| {
                                    (c * c2, k.iter().chain(k2).copied().collect::<Vec<_>>())
                                })
                            })
                            .collect();
                    }
                    Some(acc)
                }
                _ => None,
            }
        }
        let terms = flat(f).ok_or_else(|| Error::ShapeMismatch(format!("{f:?} is not a trigonometric polynomial")))?;
        for (c, k) in terms {
            let k = if k.is_empty() { vec![0; self.d] } else { k };
            push(k, c)?;
        }
        Ok(out)
    }

    /// Whether `e(k·x)` is invariant: `Sᵀk = k` and `k·b ∈ Z`.
    fn invariant(&self, k: &[i64]) -> bool {
        if let Some(a) = &self.affine {
            let n = a.n_power(1);
            if (0..self.d).any(|j| (0..self.d).map(|i| n[i][j] * k[i] as i128).sum::<i128>() != 0) {
                return false;
            }
        }
        let dot = k
            .iter()
            .zip(&self.alpha)
            .fold(Surd::zero(), |acc, (k, a)| acc + a * &Surd::from_i64(*k));
        dot.is_integer()
    }

    /// `(S^n)ᵀk` and `e(k·b_n)`.
    fn act(&self, k: &[i64], n: u64) -> Result<(Vec<i64>, Complex64)> {
        match &self.affine {
            None => {
                let ph: Phase = k.iter().zip(&self.phase).map(|(k, a)| a.mul_i128(*k as i128 * n as i128)).sum();
                Ok((k.to_vec(), ph.e()))
            }
            Some(a) => {
                let d = self.d;
                let mut out = vec![0i128; d];
                for p in 0..d {
                    let c = binomial_i128(n as i128, p as u32)
                        .ok_or(Error::Overflow { n: n as i64 })?;
                    let np = a.n_power(p);
                    for j in 0..d {
                        let s: i128 = (0..d).map(|i| np[i][j] * k[i] as i128).sum();
                        out[j] += c * s;
                    }
                }
                let b_n = a.iterate(&vec![Phase::ZERO; d], n as i64);
                let ph: Phase = k.iter().zip(&b_n).map(|(k, b)| b.mul_i128(*k as i128)).sum();
                let out = out
                    .into_iter()
                    .map(|v| i64::try_from(v).map_err(|_| Error::Overflow { n: n as i64 }))
                    .collect::<Result<_>>()?;
                Ok((out, ph.e()))
            }
        }
    }

    fn base(&self, f: &Fourier) -> f64 {
        f.iter().filter(|(k, _)| self.invariant(k)).map(|(_, c)| c.norm_sqr()).sum()
    }

    /// `f̄ · T^n f`.
    fn difference(&self, f: &Fourier, n: u64) -> Result<Fourier> {
        let mut shifted = Fourier::new();
        for (k, c) in f {
            let (k2, ph) = self.act(k, n)?;
            *shifted.entry(k2).or_default() += c * ph;
        }
        let mut out = Fourier::new();
        for (j, cj) in f {
            for (k, ck) in &shifted {
                let key: Vec<i64> = k.iter().zip(j).map(|(a, b)| a - b).collect();
                *out.entry(key).or_default() += cj.conj() * ck;
            }
        }
        out.retain(|_, c| c.norm_sqr() > 0.0);
        Ok(out)
    }

    fn level(&self, f: &Fourier, ell: u32, n_trunc: u64) -> Result<f64> {
        if ell == 1 {
            return Ok(self.base(f));
        }
        let mut sum = NeumaierSum::default();
        for n in 1..=n_trunc {
            sum.add(self.level(&self.difference(f, n)?, ell - 1, n_trunc)?);
        }
        Ok(sum.value() / n_trunc as f64)
    }
}

fn binomial_i128(n: i128, k: u32) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 0..k as i128 {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// `⦀f⦀_ℓ` by the inductive recursion.
pub fn seminorm_recursive(system: &System, f: &Observable, ell: u32, n_trunc: u64) -> Result<SeminormResult> {
    if ell == 0 {
        return Err(Error::Precondition("ℓ must be at least 1".into()));
    }
    let mut moduli = Vec::new();
    if finite_moduli(system, &mut moduli) {
        let values = finite_values(system, f)?;
        let perm = FinitePerm::new(&moduli);
        let value = root(perm.level(&values, ell), ell);
        return Ok(SeminormResult {
            ell,
            value,
            method: Method::RecursiveExact { period: perm.period },
            error: Some(0.0),
        });
    }
    if let Observable::Constant(c) = f {
        return Ok(SeminormResult { ell, value: c.norm(), method: Method::RecursiveExact { period: 1 }, error: Some(0.0) });
    }
    let model = TorusModel::from_system(system)
        .ok_or_else(|| Error::ShapeMismatch(format!("no seminorm model for {}", system.name())))?;
    let coeffs = model.coefficients(f)?;
    let n_trunc = n_trunc.max(2);
    let full = model.level(&coeffs, ell, n_trunc)?;
    let error = if ell == 1 {
        0.0
    } else {
        let half = model.level(&coeffs, ell, n_trunc / 2)?;
        (root(full, ell) - root(half, ell)).abs()
    };
    Ok(SeminormResult {
        ell,
        value: root(full, ell),
        method: if ell == 1 { Method::RecursiveExact { period: 1 } } else { Method::Recursive { n_trunc } },
        error: Some(error),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductIdentity {
    /// `⦀f⦀_{ℓ+1}^2` on the system.
    pub lhs: f64,
    /// `⦀f ⊗ f̄⦀_ℓ` on the product with itself.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `⦀f⦀_{ℓ+1}^2 = ⦀f ⊗ f̄⦀_ℓ` on a finite system to within `1e-9`.
pub fn product_identity_check(system: &System, f: &Observable, ell: u32) -> Result<ProductIdentity> {
    let mut moduli = Vec::new();
    if !finite_moduli(system, &mut moduli) {
        return Err(Error::Precondition("product identity is checked on finite systems".into()));
    }
    let lhs = seminorm_recursive(system, f, ell + 1, 0)?.value.powi(2);
    let square = System::Product(vec![system.clone(), system.clone()]);
    let tensor = Observable::Tensor(vec![f.clone(), f.conj()]);
    let rhs = seminorm_recursive(&square, &tensor, ell, 0)?.value;
    Ok(ProductIdentity { lhs, rhs, holds: (lhs - rhs).abs() <= 1e-9 })
}
