//! Smoothness norms of polynomial phases, a brute-force search for
//! frequencies along which an affine orbit fails to equidistribute, and
//! uniform equidistribution checks on windows.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, Phase, Surd};
use crate::systems::{evaluate, iterate, AffineTorus, Observable, Point, System};

/// `p(n) = Σ_i C(n, i) α_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialPoly {
    pub coeffs: Vec<Surd>,
}

/// Stirling numbers of the second kind `S(j, i)` for `j, i ≤ k`.
fn stirling2(k: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); k + 1]; k + 1];
    s[0][0] = BigInt::one();
    for j in 1..=k {
        for i in 1..=j {
            s[j][i] = BigInt::from(i) * &s[j - 1][i] + &s[j - 1][i - 1];
        }
    }
    s
}

/// Signed Stirling numbers of the first kind: `n(n−1)…(n−i+1) = Σ_j s(i, j) n^j`.
fn stirling1(k: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); k + 1]; k + 1];
    s[0][0] = BigInt::one();
    for i in 1..=k {
        for j in 1..=i {
            s[i][j] = &s[i - 1][j - 1] - BigInt::from(i - 1) * &s[i - 1][j];
        }
    }
    s
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * j)
}

impl BinomialPoly {
    pub fn new(coeffs: Vec<Surd>) -> Self {
        BinomialPoly { coeffs }
    }

    /// Exact conversion from `Σ_j c_j n^j`, using `n^j = Σ_i S(j, i) i! C(n, i)`.
    pub fn from_monomial(c: &[Surd]) -> Self {
        let k = c.len().saturating_sub(1);
        let s = stirling2(k);
        let coeffs = (0..c.len())
            .map(|i| {
                let w = factorial(i);
                (i..c.len()).fold(Surd::zero(), |acc, j| {
                    let m = BigRational::from_integer(&s[j][i] * &w);
                    &acc + &c[j].scale(&m)
                })
            })
            .collect();
        BinomialPoly { coeffs }
    }

    pub fn from_integer_monomial(c: &[i64]) -> Self {
        Self::from_monomial(&c.iter().map(|&x| Surd::from_i64(x)).collect::<Vec<_>>())
    }

    /// Monomial coefficients `c_j` with `p(n) = Σ_j c_j n^j`.
    pub fn to_monomial(&self) -> Vec<Surd> {
        let k = self.coeffs.len().saturating_sub(1);
        let s = stirling1(k);
        (0..self.coeffs.len())
            .map(|j| {
                (j..self.coeffs.len()).fold(Surd::zero(), |acc, i| {
                    let m = BigRational::new(s[i][j].clone(), factorial(i));
                    &acc + &self.coeffs[i].scale(&m)
                })
            })
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// `p(n)` modulo one.
    pub fn eval_phase(&self, n: i64) -> Phase {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| Phase::from_surd(a).mul_big(&binomial(n, i)))
            .sum()
    }
}

fn binomial(n: i64, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k as i64 {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// Distance from `a` to the nearest integer.
pub fn dist_to_int(a: &Surd) -> f64 {
    let frac = (a - &Surd::from_rational(BigRational::from_integer(a.floor()))).to_f64();
    frac.min(1.0 - frac).max(0.0)
}

/// `max_{i ≥ 1} N^i ‖α_i‖`.
pub fn cinf_norm(p: &BinomialPoly, n: u64) -> f64 {
    p.coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| (n as f64).powi(i as i32) * dist_to_int(a))
        .fold(0.0, f64::max)
}

/// `κ · T^n x` as a binomial polynomial in `n`:
/// `α_0 = κ·x`, `α_i = κ·N^i x + κ·N^{i−1} b`.
pub fn orbit_polynomial(t: &AffineTorus, x: &[Surd], kappa: &[i64]) -> BinomialPoly {
    let d = t.d();
    let dot = |m: &[Vec<i128>], v: &[Surd]| -> Surd {
        let mut acc = Surd::zero();
        for (r, row) in m.iter().enumerate() {
            if kappa[r] == 0 {
                continue;
            }
            for (c, coef) in row.iter().enumerate() {
                let w = *coef * kappa[r] as i128;
                if w != 0 {
                    acc = &acc + &v[c].scale(&BigRational::from_integer(BigInt::from(w)));
                }
            }
        }
        acc
    };
    let mut coeffs = vec![dot(t.n_power(0), x)];
    for i in 1..=d {
        coeffs.push(&dot(t.n_power(i), x) + &dot(t.n_power(i - 1), &t.b));
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(Surd::is_zero) {
        coeffs.pop();
    }
    BinomialPoly { coeffs }
}

/// Exact coordinates of a torus point.
pub fn phase_coords(x: &[Phase]) -> Vec<Surd> {
    let denom = BigInt::one() << 128usize;
    x.iter().map(|p| Surd::from_rational(BigRational::new(BigInt::from(p.0), denom.clone()))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyHit {
    pub kappa: Vec<i64>,
    pub norm: f64,
    pub poly: BinomialPoly,
}

fn frequencies(d: usize, m: i64) -> Vec<Vec<i64>> {
    let side = (2 * m + 1) as usize;
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut k = vec![0i64; d];
            for c in (0..d).rev() {
                k[c] = (idx % side) as i64 - m;
                idx /= side;
            }
            k
        })
        .filter(|k| k.iter().any(|&c| c != 0))
        .collect()
}

/// Minimal `C^∞[N]` norm of `κ · T^n x` over `0 < |κ|_∞ ≤ M`, truncated to
/// degree `degree`; `None` unless the minimum is at most `threshold`. Ties
/// go to the lexicographically smallest `κ`.
pub fn frequency_search(
    t: &AffineTorus,
    x: &[Surd],
    degree: usize,
    n: u64,
    m: i64,
    threshold: f64,
) -> Result<Option<FrequencyHit>> {
    if x.len() != t.d() {
        return Err(Error::ShapeMismatch(format!("point of dimension {} for a {}-torus", x.len(), t.d())));
    }
    if m < 1 {
        return Err(Error::Precondition("frequency bound must be positive".into()));
    }
    let best = frequencies(t.d(), m)
        .into_par_iter()
        .map(|kappa| {
            let mut poly = orbit_polynomial(t, x, &kappa);
            poly.coeffs.truncate(degree + 1);
            let norm = cinf_norm(&poly, n);
            FrequencyHit { kappa, norm, poly }
        })
        .min_by(|a, b| a.norm.total_cmp(&b.norm).then_with(|| a.kappa.cmp(&b.kappa)));
    Ok(best.filter(|h| h.norm <= threshold))
}

/// Integer polynomial `Σ_j c_j n^j`.
pub fn eval_int_poly(c: &[i64], n: i64) -> Result<i64> {
    c.iter().rev().try_fold(0i64, |acc, &cj| {
        acc.checked_mul(n).and_then(|v| v.checked_add(cj)).ok_or(Error::Overflow { n })
    })
}

/// `max_x |E_{M ≤ n ≤ N} F(T^{p(n)} x) − ∫F|` over the given points.
pub fn uniform_equidist_check(
    system: &System,
    obs: &Observable,
    p: &[i64],
    m_win: i64,
    n_win: i64,
    points: &[Point],
) -> Result<f64> {
    crate::systems::check_shape(system, obs)?;
    if n_win < m_win {
        return Err(Error::Precondition("empty window".into()));
    }
    let mean = obs.mean().ok_or_else(|| Error::Precondition("observable has no exact integral".into()))?;
    let exps = (m_win..=n_win).map(|n| eval_int_poly(p, n)).collect::<Result<Vec<_>>>()?;
    let len = exps.len() as f64;
    let devs = points
        .par_iter()
        .map(|x| {
            let mut s = ComplexSum::new();
            for &e in &exps {
                s.add(evaluate(obs, &iterate(system, x, e)?)?);
            }
            Ok((s.value() / len - mean).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Exact mean of a character on a finite cyclic group shifted along `p(n)`;
/// helper for tests of non-ergodic behaviour.
pub fn cyclic_character_average(m: u64, j: i64, p: &[i64], m_win: i64, n_win: i64) -> Result<Complex64> {
    let mut s = ComplexSum::new();
    for n in m_win..=n_win {
        let v = eval_int_poly(p, n)?.rem_euclid(m as i64);
        s.add(Phase::from_ratio(j * v, m as i64).e());
    }
    Ok(s.value() / (n_win - m_win + 1) as f64)
}
