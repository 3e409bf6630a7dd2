//! Taylor reduction of `[a(N + n)]` on short windows: choice of the
//! derivative order, of the window length `l(t) = t^γ`, and a numeric check
//! that the floor of the Taylor polynomial differs from `[a(N + n)]` by at
//! most one in a fixed direction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{classify_convergence, ConvergenceClass, Growth, HardyNormalForm};
use crate::numeric::{Interval, Surd};
use crate::sequences::{floor_linear, Evaluator, START_PRECISION};

/// Largest derivative order tried by [`select_order`].
pub const MAX_ORDER: usize = 32;

/// A symbolic growth comparison and whether it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub relation: String,
    pub holds: bool,
}

impl Certificate {
    fn new(relation: String, holds: bool) -> Self {
        Certificate { relation, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderChoice {
    pub k: usize,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowChoice {
    /// Open exponent interval `(lo, hi)` for `γ`.
    pub lo: Surd,
    pub hi: Surd,
    pub gamma: Surd,
    /// Power of `log t` in `l(t) = t^γ (log t)^δ`; nonzero only when the
    /// power interval collapses to a point.
    #[serde(serialize_with = "ser_rational")]
    pub delta: BigRational,
    pub certificates: Vec<Certificate>,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

impl WindowChoice {
    /// `⌈N^γ (log N)^δ⌉`, at least 1.
    pub fn length_at(&self, n: i64) -> i64 {
        let x = n as f64;
        let delta = self.delta.to_f64().unwrap_or(0.0);
        (x.powf(self.gamma.to_f64()) * x.ln().powf(delta)).ceil().max(1.0) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionPlan {
    pub a: String,
    pub k: usize,
    pub gamma: Surd,
    pub window: WindowChoice,
    pub certificates: Vec<Certificate>,
}

fn growth_of(a: &HardyNormalForm, k: usize) -> Option<Growth> {
    a.nth_derivative(k).leading_growth()
}

fn scaled(g: &Growth, m: i64) -> (Surd, i64) {
    (&g.alpha * &Surd::from_i64(m), g.beta as i64 * m)
}

fn show(g: &Growth) -> String {
    let t = match g.alpha.to_string().as_str() {
        "0" => String::new(),
        "1" => "t".into(),
        s if s.contains('/') || s.starts_with('-') => format!("t^({s})"),
        s => format!("t^{s}"),
    };
    let l = match g.beta {
        0 => String::new(),
        1 => "log(t)".into(),
        b => format!("log(t)^{b}"),
    };
    match (t.is_empty(), l.is_empty()) {
        (true, true) => "1".into(),
        (false, true) => t,
        (true, false) => l,
        (false, false) => format!("{t}*{l}"),
    }
}

/// Smallest `k` with `1/t^k ≺ a^(k) ≺ 1`,
/// `(a^(k+1))^k ≺ (a^(k))^(k+1)` and `|a^(k+1)|` eventually decreasing.
pub fn select_order(a: &HardyNormalForm) -> Result<OrderChoice> {
    let class = classify_convergence(a);
    if class != ConvergenceClass::GoodCond1 {
        return Err(Error::HypothesisFailed(format!("{a} is not away from polynomials ({class:?})")));
    }
    let residual = a.filter_terms(|t| !t.is_polynomial());
    if residual.leading_growth().is_none_or(|g| g <= Growth::log()) {
        return Err(Error::HypothesisFailed(format!("{a} stays within O(log t) of a real polynomial")));
    }
    for k in 1..=MAX_ORDER {
        let (Some(gk), Some(gk1)) = (growth_of(a, k), growth_of(a, k + 1)) else {
            break;
        };
        let ki = k as i64;
        let lower = Growth::power(-ki) < gk;
        let upper = gk < Growth::bounded();
        let ratio = scaled(&gk1, ki) < scaled(&gk, ki + 1);
        let decreasing = gk1.alpha.is_negative();
        if lower && upper && ratio && decreasing {
            let certificates = vec![
                Certificate::new(format!("t^(-{k}) ≺ a^({k}) ~ {}", show(&gk)), lower),
                Certificate::new(format!("a^({k}) ~ {} ≺ 1", show(&gk)), upper),
                Certificate::new(format!("(a^({}))^{k} ≺ (a^({k}))^{}", k + 1, k + 1), ratio),
                Certificate::new(format!("|a^({})| ~ {} decreases", k + 1, show(&gk1)), decreasing),
            ];
            return Ok(OrderChoice { k, certificates });
        }
    }
    Err(Error::HypothesisFailed(format!("no admissible derivative order up to {MAX_ORDER} for {a}")))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Midpoint of the exponent interval for `l = t^γ` from
/// `(a^(k))^(-1/k) ≺ l ≺ min(t, (a^(k+1))^(-1/(k+1)), (a^(k))^(-(1/k+1/k²)))`,
/// with logarithmic factors ignored. If that interval is a single point the
/// powers of `log t` are compared instead and `l = t^γ (log t)^δ`.
pub fn window_length(a: &HardyNormalForm, k: usize) -> Result<WindowChoice> {
    if k == 0 {
        return Err(Error::EmptyWindow("order must be positive".into()));
    }
    let (Some(gk), Some(gk1)) = (growth_of(a, k), growth_of(a, k + 1)) else {
        return Err(Error::EmptyWindow(format!("derivative of order {} vanishes", k + 1)));
    };
    let ki = k as i64;
    let lo = (-&gk.alpha).scale(&frac(1, ki));
    let bounds = [
        ("t".to_string(), Surd::one()),
        (format!("(a^({}))^(-1/{})", k + 1, k + 1), (-&gk1.alpha).scale(&frac(1, ki + 1))),
        (format!("(a^({k}))^(-(1/{k}+1/{}))", ki * ki), (-&gk.alpha).scale(&frac(ki + 1, ki * ki))),
    ];
    let hi = bounds.iter().map(|b| b.1.clone()).min().unwrap();
    if lo > hi {
        return Err(Error::EmptyWindow(format!("exponent interval ({lo}, {hi}) is empty")));
    }
    if lo == hi {
        // the powers agree, so the logarithms decide
        let beta = |g: &Growth, n: i64, d: i64| BigRational::from_integer(BigInt::from(-g.beta)) * frac(n, d);
        let log_lo = beta(&gk, 1, ki);
        let log_bounds = [BigRational::from_integer(BigInt::from(0)), beta(&gk1, 1, ki + 1), beta(&gk, ki + 1, ki * ki)];
        let log_hi = bounds
            .iter()
            .zip(log_bounds)
            .filter(|(b, _)| b.1 == hi)
            .map(|(_, l)| l)
            .min()
            .unwrap();
        if log_lo >= log_hi {
            return Err(Error::EmptyWindow(format!(
                "window t^({lo}) log(t)^({log_lo}) .. t^({hi}) log(t)^({log_hi}) is empty"
            )));
        }
        let delta = (&log_lo + &log_hi) * frac(1, 2);
        let gamma = lo.clone();
        let l = format!("t^({gamma})*log(t)^({delta})");
        let certificates = vec![
            Certificate::new(format!("(a^({k}))^(-1/{k}) ~ t^({lo})*log(t)^({log_lo}) ≺ l = {l}"), log_lo < delta),
            Certificate::new(format!("l = {l} ≺ t^({hi})*log(t)^({log_hi})"), delta < log_hi),
        ];
        return Ok(WindowChoice { lo, hi, gamma, delta, certificates });
    }
    let gamma = (&lo + &hi).scale(&frac(1, 2));
    let mut certificates =
        vec![Certificate::new(format!("(a^({k}))^(-1/{k}) ~ t^({lo}) ≺ l = t^({gamma})"), lo < gamma)];
    for (name, e) in &bounds {
        certificates.push(Certificate::new(format!("l = t^({gamma}) ≺ {name} ~ t^({e})"), gamma < *e));
    }
    Ok(WindowChoice { lo, hi, gamma, delta: BigRational::from_integer(BigInt::from(0)), certificates })
}

pub fn reduction_plan(a: &HardyNormalForm) -> Result<ReductionPlan> {
    let order = select_order(a)?;
    let window = window_length(a, order.k)?;
    let mut certificates = order.certificates;
    certificates.extend(window.certificates.iter().cloned());
    Ok(ReductionPlan { a: a.to_string(), k: order.k, gamma: window.gamma.clone(), window, certificates })
}

#[derive(Clone, Debug, Serialize)]
pub struct TaylorReport {
    pub a: String,
    pub k: usize,
    pub gamma: Option<f64>,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "L")]
    pub l: i64,
    /// Counts of `[a(N + n)] − [P_N(n)]`.
    pub histogram: BTreeMap<i64, u64>,
    pub max_remainder: f64,
    /// `|a^(k+1)(N)| L^(k+1) / (k+1)!`.
    pub remainder_bound: f64,
    /// Eventual sign of `a^(k+1)`; errors must lie in `{0, sign}`.
    pub sign: i32,
    pub passed: bool,
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * j)
}

/// Compares `[a(N + n)]` with the floor of the degree-`k` Taylor polynomial
/// `P_N(n) = Σ_{j ≤ k} a^(j)(N) n^j / j!` for `1 ≤ n ≤ L`.
pub fn taylor_window_check(a: &HardyNormalForm, n0: i64, k: usize, l: i64) -> Result<TaylorReport> {
    if n0 < 1 || l < 1 {
        return Err(Error::Precondition("N and L must be positive".into()));
    }
    let derivs: Vec<Evaluator> = (0..=k).map(|j| Evaluator::new(&a.nth_derivative(j))).collect();
    let next = a.nth_derivative(k + 1);
    let sign = next.eventual_sign();
    let full = Evaluator::new(a);
    let weights = |n: i64| -> Vec<BigRational> {
        (0..=k)
            .map(|j| BigRational::new(num_traits::pow(BigInt::from(n), j), factorial(j)))
            .collect()
    };
    let prec = 2 * START_PRECISION;
    let rows: Vec<(i64, f64)> = (0..l as usize)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| {
            let n = i as i64 + 1;
            let w = weights(n);
            let parts: Vec<(&Evaluator, BigRational)> = derivs.iter().zip(w.iter().cloned()).collect();
            let p_floor = floor_linear(&parts, n0)?.value;
            let a_floor = full.floor(n0 + n)?.value;
            let mut poly = Interval::zero(prec);
            for (e, wj) in derivs.iter().zip(&w) {
                poly = poly.add(&e.interval(n0, prec)?.mul(&Interval::from_rational(wj, prec)));
            }
            let rem = full.interval(n0 + n, prec)?.sub(&poly);
            let err = crate::sequences::eval::floor_to_i64(&(a_floor - p_floor), n)?;
            Ok((err, rem.lo_f64().abs().max(rem.hi_f64().abs())))
        })
        .collect::<Result<_>>()?;
    let mut histogram = BTreeMap::new();
    let mut max_remainder = 0.0f64;
    for (i, (err, rem)) in rows.iter().enumerate() {
        *histogram.entry(*err).or_insert(0) += 1;
        max_remainder = max_remainder.max(*rem);
        if *rem >= 1.0 {
            return Err(Error::RemainderTooLarge { n: n0 + i as i64 + 1, max_remainder });
        }
    }
    let passed = histogram.keys().all(|&e| e == 0 || e == sign as i64);
    let fact = factorial(k + 1).to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let remainder_bound = next.eval_f64(n0 as f64).abs() * (l as f64).powi(k as i32 + 1) / fact;
    let gamma = window_length(a, k).ok().map(|w| w.gamma.to_f64());
    Ok(TaylorReport {
        a: a.to_string(),
        k,
        gamma,
        n: n0,
        l,
        histogram,
        max_remainder,
        remainder_bound,
        sign,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::parse;

    fn plan(s: &str) -> (usize, Surd) {
        let p = reduction_plan(&parse(s).unwrap()).unwrap();
        assert!(p.certificates.iter().all(|c| c.holds));
        (p.k, p.gamma)
    }

    #[test]
    fn orders_and_windows() {
        assert_eq!(plan("t^3/2"), (2, Surd::from_ratio(5, 16)));
        assert_eq!(plan("t*log(t)"), (2, Surd::from_ratio(7, 12)));
        assert_eq!(plan("t^1/2"), (1, Surd::from_ratio(5, 8)));
        assert_eq!(plan("t^5/2"), (3, Surd::from_ratio(7, 36)));
        let w = window_length(&parse("t^3/2").unwrap(), 2).unwrap();
        assert_eq!((w.lo, w.hi), (Surd::from_ratio(1, 4), Surd::from_ratio(3, 8)));
    }

    #[test]
    fn hypothesis_required() {
        assert!(matches!(select_order(&parse("t^2").unwrap()), Err(Error::HypothesisFailed(_))));
        assert!(matches!(select_order(&parse("t/2 + log(t)").unwrap()), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn window_checks() {
        let a = parse("t^3/2").unwrap();
        let r = taylor_window_check(&a, 10_000, 2, 18).unwrap();
        assert!(r.passed && r.max_remainder < 1.0);
        assert!(r.histogram.keys().all(|e| [0, -1].contains(e)));
        assert_eq!(r.sign, -1);
        let r = taylor_window_check(&parse("t^2").unwrap(), 12_345, 2, 500).unwrap();
        assert_eq!(r.histogram, BTreeMap::from([(0, 500)]));
        assert!(r.max_remainder < 1e-30);
        assert!(matches!(
            taylor_window_check(&a, 10_000, 2, 2000),
            Err(Error::RemainderTooLarge { .. })
        ));
    }
}
