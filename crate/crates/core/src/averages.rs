//! Multiple ergodic averages `E_{n≤N} f_1(T_1^{a_1(n)}x)···f_ℓ(T_ℓ^{a_ℓ(n)}x)`
//! and the numerical convergence and recurrence experiments built on them.
//!
//! The L² norm of a running average is approximated by the root mean square
//! over a deterministic set of initial points. Work is split over initial
//! points only, and each point sums its terms serially, so parallel and
//! serial runs give bit-identical results.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{classify_convergence, ConvergenceClass};
use crate::hardy::{Growth, HardyNormalForm};
use crate::numeric::{ComplexSum, NeumaierSum, Phase};
use crate::sequences::{floor_seq, FloorSequence};
use crate::systems::{check_shape, evaluate, grid, iterate, Observable, Point, System};

/// Default number of initial points.
pub const DEFAULT_GRID: usize = 256;
/// Default oscillation verdict threshold.
pub const DEFAULT_OSC_THRESHOLD: f64 = 0.05;

/// An iterate sequence: `j·[a(n)]` for a certified floor sequence, or `j·n`.
#[derive(Clone, Debug)]
pub enum IterateSeq {
    Floor { seq: Arc<FloorSequence>, multiple: i64 },
    Linear { multiple: i64 },
}

impl IterateSeq {
    pub fn floor(seq: FloorSequence) -> Self {
        IterateSeq::Floor { seq: Arc::new(seq), multiple: 1 }
    }

    pub fn multiple_of(seq: &Arc<FloorSequence>, multiple: i64) -> Self {
        IterateSeq::Floor { seq: Arc::clone(seq), multiple }
    }

    pub fn linear(multiple: i64) -> Self {
        IterateSeq::Linear { multiple }
    }

    #[inline]
    pub fn at(&self, n: i64) -> i64 {
        match self {
            IterateSeq::Floor { seq, multiple } => multiple * seq.at(n),
            IterateSeq::Linear { multiple } => multiple * n,
        }
    }

    fn first(&self) -> i64 {
        match self {
            IterateSeq::Floor { seq, .. } => seq.n_lo,
            IterateSeq::Linear { .. } => 1,
        }
    }

    fn last(&self) -> Option<i64> {
        match self {
            IterateSeq::Floor { seq, .. } => Some(seq.n_hi()),
            IterateSeq::Linear { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            IterateSeq::Floor { seq, multiple: 1 } => format!("[{}]", seq.source),
            IterateSeq::Floor { seq, multiple } => format!("{multiple}*[{}]", seq.source),
            IterateSeq::Linear { multiple: 1 } => "n".into(),
            IterateSeq::Linear { multiple } => format!("{multiple}*n"),
        }
    }
}

/// Powers of two up to `n_max`, followed by `n_max` itself.
pub fn dyadic_checkpoints(n_max: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&c| c <= n_max).collect();
    if v.last() != Some(&n_max) && n_max > 0 {
        v.push(n_max);
    }
    v
}

#[derive(Clone, Debug)]
pub struct AverageSpec {
    /// One system per factor, or a single system used for every factor.
    pub systems: Vec<System>,
    pub observables: Vec<Observable>,
    pub sequences: Vec<IterateSeq>,
    pub points: Vec<Point>,
    pub n_max: u64,
    pub checkpoints: Vec<u64>,
    /// Smallest index `n` to average over.
    pub n_min: i64,
    /// Run on one thread.
    pub serial: bool,
}

impl AverageSpec {
    /// Same system for every factor, default grid and dyadic checkpoints.
    pub fn new(
        system: System,
        observables: Vec<Observable>,
        sequences: Vec<IterateSeq>,
        n_max: u64,
    ) -> Self {
        let points = grid(&system, DEFAULT_GRID);
        AverageSpec {
            systems: vec![system],
            observables,
            sequences,
            points,
            n_max,
            checkpoints: dyadic_checkpoints(n_max),
            n_min: 1,
            serial: false,
        }
    }

    pub fn ell(&self) -> usize {
        self.observables.len()
    }

    fn system(&self, i: usize) -> &System {
        if self.systems.len() == 1 {
            &self.systems[0]
        } else {
            &self.systems[i]
        }
    }

    /// First index `n` at which every sequence is defined.
    pub fn n_start(&self) -> i64 {
        self.sequences.iter().map(IterateSeq::first).max().unwrap_or(1).max(self.n_min).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let ell = self.ell();
        if ell == 0 || self.sequences.len() != ell {
            return Err(Error::ShapeMismatch(format!(
                "{} observables, {} sequences",
                ell,
                self.sequences.len()
            )));
        }
        if self.systems.len() != 1 && self.systems.len() != ell {
            return Err(Error::ShapeMismatch(format!("{} systems for {ell} factors", self.systems.len())));
        }
        if self.points.is_empty() {
            return Err(Error::Config("no initial points".into()));
        }
        for i in 0..ell {
            check_shape(self.system(i), &self.observables[i])?;
            if let Some(hi) = self.sequences[i].last() {
                if hi < self.n_max as i64 {
                    return Err(Error::Config(format!(
                        "sequence {} stops at {hi} < {}",
                        self.sequences[i].label(),
                        self.n_max
                    )));
                }
            }
        }
        for x in &self.points {
            for s in &self.systems {
                if !s.accepts(x) {
                    return Err(Error::ShapeMismatch(format!("{x:?} is not a point of {}", s.name())));
                }
            }
        }
        let mut last = 0;
        for &c in &self.checkpoints {
            if c <= last || c > self.n_max || (c as i64) < self.n_start() {
                return Err(Error::Config(format!("bad checkpoint {c}")));
            }
            last = c;
        }
        Ok(())
    }

    /// `Π sup |f_i|`.
    pub fn bound(&self) -> f64 {
        self.observables.iter().map(Observable::sup_norm).product()
    }
}

/// `k ↦ f(T^k x)` for one factor and one initial point.
enum Orbit<'a> {
    /// `Σ c_j e(base_j + k·step_j)`: characters along a rotation.
    Trig(Vec<(Complex64, Phase, Phase)>),
    Generic { system: &'a System, obs: &'a Observable, x: Point },
}

impl<'a> Orbit<'a> {
    fn new(system: &'a System, obs: &'a Observable, x: &Point) -> Self {
        if let (System::TorusRotation { phase, .. }, Point::Torus(v)) = (system, x) {
            let dot = |k: &[i64], p: &[Phase]| -> Phase {
                k.iter().zip(p).map(|(k, p)| p.mul_i128(*k as i128)).sum()
            };
            let terms = match obs {
                Observable::Constant(c) => Some(vec![(*c, Phase::ZERO, Phase::ZERO)]),
                Observable::TorusCharacter(k) if k.len() == v.len() => {
                    Some(vec![(Complex64::new(1.0, 0.0), dot(k, v), dot(k, phase))])
                }
                Observable::TrigPolynomial(ts) if ts.iter().all(|(_, k)| k.len() == v.len()) => {
                    Some(ts.iter().map(|(c, k)| (*c, dot(k, v), dot(k, phase))).collect())
                }
                _ => None,
            };
            if let Some(t) = terms {
                return Orbit::Trig(t);
            }
        }
        Orbit::Generic { system, obs, x: x.clone() }
    }

    #[inline]
    fn at(&self, k: i64) -> Result<Complex64> {
        match self {
            Orbit::Trig(ts) => {
                Ok(ts.iter().map(|(c, b, s)| c * (*b + s.mul_i128(k as i128)).e()).sum())
            }
            Orbit::Generic { system, obs, x } => evaluate(obs, &iterate(system, x, k)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    #[serde(rename = "N")]
    pub n: u64,
    /// Running average at each initial point.
    #[serde(serialize_with = "ser_complex_vec")]
    pub averages: Vec<Complex64>,
    /// Mean of `averages` over the initial points.
    #[serde(serialize_with = "ser_complex")]
    pub mean: Complex64,
    /// Root mean square of `averages`.
    pub rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageSeries {
    pub checkpoints: Vec<Checkpoint>,
    /// Product of observable sup norms.
    pub bound: f64,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_complex_vec<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

impl AverageSeries {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("at least one checkpoint")
    }

    pub fn at(&self, n: u64) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.n == n)
    }

    /// CSV with columns `N, re, im, rms` (the complex value is the grid mean).
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["N", "re", "im", "rms"]).map_err(io)?;
        for c in &self.checkpoints {
            out.write_record([
                c.n.to_string(),
                format!("{:e}", c.mean.re),
                format!("{:e}", c.mean.im),
                format!("{:e}", c.rms),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

fn make_checkpoint(n: u64, averages: Vec<Complex64>) -> Checkpoint {
    let k = averages.len() as f64;
    let mean = averages.iter().sum::<Complex64>() / k;
    let rms = (averages.iter().map(|z| z.norm_sqr()).sum::<f64>() / k).sqrt();
    Checkpoint { n, averages, mean, rms }
}

/// Running averages at the checkpoints for one initial point.
fn point_series(spec: &AverageSpec, x: &Point) -> Result<Vec<Complex64>> {
    let orbits: Vec<Orbit> = (0..spec.ell())
        .map(|i| Orbit::new(spec.system(i), &spec.observables[i], x))
        .collect();
    let start = spec.n_start();
    let mut sum = ComplexSum::default();
    let mut out = Vec::with_capacity(spec.checkpoints.len());
    let mut next = spec.checkpoints.iter().peekable();
    for n in start..=spec.n_max as i64 {
        let mut term = Complex64::new(1.0, 0.0);
        for (orb, seq) in orbits.iter().zip(&spec.sequences) {
            term *= orb.at(seq.at(n))?;
        }
        sum.add(term);
        while next.peek().is_some_and(|&&c| c as i64 == n) {
            next.next();
            out.push(sum.value() / (n - start + 1) as f64);
        }
    }
    Ok(out)
}

fn map_points<T: Send>(
    points: &[Point],
    serial: bool,
    f: impl Fn(&Point) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    if serial {
        points.iter().map(f).collect()
    } else {
        points.par_iter().map(f).collect()
    }
}

pub fn multi_average(spec: &AverageSpec) -> Result<AverageSeries> {
    spec.validate()?;
    let per_point = map_points(&spec.points, spec.serial, |x| point_series(spec, x))?;
    let bound = spec.bound();
    let checkpoints = spec
        .checkpoints
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let avgs: Vec<Complex64> = per_point.iter().map(|p| p[j]).collect();
            debug_assert!(avgs.iter().all(|z| z.norm() <= bound * (1.0 + 1e-12) + 1e-12));
            make_checkpoint(n, avgs)
        })
        .collect();
    Ok(AverageSeries { checkpoints, bound })
}

/// The running average at every `N` from the first defined index to
/// `n_max`, for a single initial point.
pub fn running_average(spec: &AverageSpec, x: &Point) -> Result<RunningAverage> {
    spec.validate()?;
    let orbits: Vec<Orbit> = (0..spec.ell())
        .map(|i| Orbit::new(spec.system(i), &spec.observables[i], x))
        .collect();
    let start = spec.n_start();
    let mut sum = ComplexSum::default();
    let mut values = Vec::with_capacity(spec.n_max as usize);
    for n in start..=spec.n_max as i64 {
        let mut term = Complex64::new(1.0, 0.0);
        for (orb, seq) in orbits.iter().zip(&spec.sequences) {
            term *= orb.at(seq.at(n))?;
        }
        sum.add(term);
        values.push(sum.value() / (n - start + 1) as f64);
    }
    Ok(RunningAverage { n_first: start as u64, values })
}

/// Hardy series, Furstenberg series and the largest pointwise difference
/// between them at each checkpoint.
#[derive(Clone, Debug, Serialize)]
pub struct FurstenbergComparison {
    pub hardy: AverageSeries,
    pub linear: AverageSeries,
    /// `(N, max_x |hardy(N, x) − linear(N, x)|)`.
    pub differences: Vec<(u64, f64)>,
}

impl FurstenbergComparison {
    /// Least-squares slope of `log difference` against `log N` over
    /// checkpoints `N ≥ n_min`.
    pub fn log_slope(&self, n_min: u64) -> Option<f64> {
        log_log_slope(self.differences.iter().filter(|(n, _)| *n >= n_min).copied())
    }
}

pub(crate) fn log_log_slope(pts: impl Iterator<Item = (u64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pts
        .filter(|(_, d)| *d > 0.0)
        .map(|(n, d)| ((n as f64).ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Compares `E f_1(T^{[a(n)]}x)···f_ℓ(T^{ℓ[a(n)]}x)` with the Furstenberg
/// average `E f_1(T^n x)···f_ℓ(T^{ℓn}x)`.
pub fn furstenberg_compare(
    system: &System,
    observables: &[Observable],
    a: &HardyNormalForm,
    n_max: u64,
    points: Option<Vec<Point>>,
    serial: bool,
) -> Result<FurstenbergComparison> {
    let class = classify_convergence(a);
    if class != ConvergenceClass::GoodCond1 {
        return Err(Error::RequiresCond1(class.to_string()));
    }
    let ell = observables.len() as i64;
    let seq = Arc::new(floor_from_two(a, n_max)?);
    let mut hardy_spec = AverageSpec::new(
        system.clone(),
        observables.to_vec(),
        (1..=ell).map(|j| IterateSeq::multiple_of(&seq, j)).collect(),
        n_max,
    );
    if let Some(p) = points {
        hardy_spec.points = p;
    }
    hardy_spec.serial = serial;
    hardy_spec.checkpoints.retain(|&c| c as i64 >= seq.n_lo);
    let mut linear_spec = hardy_spec.clone();
    linear_spec.sequences = (1..=ell).map(IterateSeq::linear).collect();
    linear_spec.n_min = seq.n_lo;
    let hardy = multi_average(&hardy_spec)?;
    let linear = multi_average(&linear_spec)?;
    let differences = hardy
        .checkpoints
        .iter()
        .zip(&linear.checkpoints)
        .map(|(h, l)| {
            let d = h.averages.iter().zip(&l.averages).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            (h.n, d)
        })
        .collect();
    Ok(FurstenbergComparison { hardy, linear, differences })
}

/// Floors of `a(n)` from the first `n` at which `a` is defined (1 or 2).
fn floor_from_two(a: &HardyNormalForm, n_max: u64) -> Result<FloorSequence> {
    let lo = if a.terms().iter().any(|t| t.beta < 0) { 2 } else { 1 };
    floor_seq(a, lo, n_max as i64)
}

/// Sets with exactly computable measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TargetSet {
    /// Product of arcs `[start_i, start_i + len_i)` on a torus.
    TorusBox { start: Vec<f64>, len: Vec<f64> },
    Cyclic(Vec<u64>),
    /// Box inside the Heisenberg fundamental domain.
    HeisenbergBox { lo: [f64; 3], hi: [f64; 3] },
}

impl TargetSet {
    pub fn arc(start: f64, len: f64) -> Self {
        TargetSet::TorusBox { start: vec![start], len: vec![len] }
    }

    pub fn measure(&self, system: &System) -> Result<f64> {
        match (self, system) {
            (TargetSet::TorusBox { len, .. }, _) => Ok(len.iter().map(|l| l.clamp(0.0, 1.0)).product()),
            (TargetSet::Cyclic(s), System::FiniteCyclic { m }) => {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                if s.iter().any(|x| x >= m) {
                    return Err(Error::ShapeMismatch("residue out of range".into()));
                }
                Ok(s.len() as f64 / *m as f64)
            }
            (TargetSet::HeisenbergBox { lo, hi }, _) => {
                Ok((0..3).map(|i| (hi[i].min(1.0) - lo[i].max(0.0)).max(0.0)).product())
            }
            _ => Err(Error::ShapeMismatch("set does not live on this system".into())),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (TargetSet::TorusBox { start, len }, Point::Torus(v)) => v
                .iter()
                .zip(start.iter().zip(len))
                .all(|(x, (s, l))| (*x - Phase::from_f64(*s)).to_f64() < *l),
            (TargetSet::Cyclic(s), Point::Cyclic(r)) => s.contains(r),
            (TargetSet::HeisenbergBox { lo, hi }, Point::Heisenberg(p)) => {
                (0..3).all(|i| lo[i] <= p[i].to_f64() && p[i].to_f64() < hi[i])
            }
            _ => false,
        }
    }
}

/// Length of the intersection of arcs `[s_i, s_i + l_i)` on the circle.
fn arcs_intersection(arcs: &[(f64, f64)]) -> f64 {
    // Cut at the first arc's start so that it becomes [0, l_0).
    let (s0, l0) = arcs[0];
    let mut cur = vec![(0.0, l0.min(1.0))];
    for &(s, l) in &arcs[1..] {
        if l >= 1.0 {
            continue;
        }
        let a = (s - s0).rem_euclid(1.0);
        let pieces = if a + l <= 1.0 { vec![(a, a + l)] } else { vec![(a, 1.0), (0.0, a + l - 1.0)] };
        let mut next = Vec::new();
        for &(x0, x1) in &cur {
            for &(y0, y1) in &pieces {
                let (lo, hi) = (f64::max(x0, y0), f64::min(x1, y1));
                if hi > lo {
                    next.push((lo, hi));
                }
            }
        }
        cur = next;
    }
    cur.iter().map(|(a, b)| b - a).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceSeries {
    /// `(N, E_{n≤N} μ(A ∩ T^{-a_1(n)}A ∩ ··· ∩ T^{-a_ℓ(n)}A))`.
    pub checkpoints: Vec<(u64, f64)>,
    pub measure: f64,
    /// `μ(A)^{ℓ+1}`.
    pub lower_bound: f64,
    #[serde(skip)]
    pub running: RunningAverage,
}

impl RecurrenceSeries {
    /// Smallest running average over `N ≥ n0`.
    pub fn min_from(&self, n0: u64) -> f64 {
        self.running.values_from(n0).iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn last(&self) -> f64 {
        self.running.values.last().map_or(f64::NAN, |z| z.re)
    }
}

/// Running averages of `μ(A ∩ T^{-a_1(n)}A ∩ ··· ∩ T^{-a_ℓ(n)}A)`.
///
/// The intersection measure is exact for boxes under torus rotations and
/// for finite cyclic systems; otherwise it is estimated on `grid_size`
/// initial points.
pub fn recurrence_average(
    system: &System,
    set: &TargetSet,
    sequences: &[IterateSeq],
    n_max: u64,
    checkpoints: &[u64],
    grid_size: usize,
) -> Result<RecurrenceSeries> {
    let measure = set.measure(system)?;
    let ell = sequences.len() as i32;
    let start = sequences.iter().map(IterateSeq::first).max().unwrap_or(1).max(1);
    for s in sequences {
        if s.last().is_some_and(|hi| hi < n_max as i64) {
            return Err(Error::Config(format!("sequence {} too short", s.label())));
        }
    }
    let term: Box<dyn Fn(i64) -> Result<f64> + Sync> = match (system, set) {
        (System::TorusRotation { phase, .. }, TargetSet::TorusBox { start: s, len })
            if s.len() == phase.len() && len.len() == phase.len() =>
        {
            Box::new(move |n| {
                let mut m = 1.0;
                for c in 0..phase.len() {
                    let mut arcs = vec![(s[c], len[c])];
                    for q in sequences {
                        // T^{-k}A = A − kα
                        let shift = phase[c].mul_i128(q.at(n) as i128).to_f64();
                        arcs.push((s[c] - shift, len[c]));
                    }
                    m *= arcs_intersection(&arcs);
                }
                Ok(m)
            })
        }
        (System::FiniteCyclic { m }, TargetSet::Cyclic(a)) => {
            let mut member = vec![false; *m as usize];
            for &r in a {
                member[r as usize] = true;
            }
            let m = *m as i64;
            Box::new(move |n| {
                let shifts: Vec<i64> = sequences.iter().map(|q| q.at(n).rem_euclid(m)).collect();
                let hits = (0..m)
                    .filter(|&x| member[x as usize] && shifts.iter().all(|s| member[((x + s) % m) as usize]))
                    .count();
                Ok(hits as f64 / m as f64)
            })
        }
        _ => {
            let pts: Vec<Point> = grid(system, grid_size).into_iter().filter(|x| set.contains(x)).collect();
            let total = grid_size as f64;
            Box::new(move |n| {
                let mut hits = 0usize;
                for x in &pts {
                    let mut ok = true;
                    for q in sequences {
                        if !set.contains(&iterate(system, x, q.at(n))?) {
                            ok = false;
                            break;
                        }
                    }
                    hits += ok as usize;
                }
                Ok(hits as f64 / total)
            })
        }
    };
    let mut sum = NeumaierSum::default();
    let mut values = Vec::with_capacity(n_max as usize);
    for n in start..=n_max as i64 {
        sum.add(term(n)?);
        values.push(sum.value() / (n - start + 1) as f64);
    }
    let running = RunningAverage {
        n_first: start as u64,
        values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    };
    let checkpoints = checkpoints
        .iter()
        .filter_map(|&c| running.get(c).map(|v| (c, v.re)))
        .collect();
    Ok(RecurrenceSeries {
        checkpoints,
        measure,
        lower_bound: measure.powi(ell + 1),
        running,
    })
}

/// Running averages indexed by `N = n_first, n_first + 1, ...`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunningAverage {
    pub n_first: u64,
    pub values: Vec<Complex64>,
}

impl RunningAverage {
    /// Running averages of the given terms, starting at `N = 1`.
    pub fn from_terms(terms: impl IntoIterator<Item = Complex64>) -> Self {
        let mut sum = ComplexSum::default();
        let values = terms
            .into_iter()
            .enumerate()
            .map(|(i, z)| {
                sum.add(z);
                sum.value() / (i + 1) as f64
            })
            .collect();
        RunningAverage { n_first: 1, values }
    }

    pub fn n_last(&self) -> u64 {
        self.n_first + self.values.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> Option<Complex64> {
        n.checked_sub(self.n_first).and_then(|i| self.values.get(i as usize).copied())
    }

    fn values_from(&self, n0: u64) -> Vec<f64> {
        let skip = n0.saturating_sub(self.n_first) as usize;
        self.values.iter().skip(skip).map(|z| z.re).collect()
    }

    /// `max − min` of the real parts over `n1 ≤ N ≤ n2`.
    pub fn osc(&self, n1: u64, n2: u64) -> f64 {
        let lo = n1.max(self.n_first);
        let hi = n2.min(self.n_last());
        if lo > hi {
            return 0.0;
        }
        let w = &self.values[(lo - self.n_first) as usize..=(hi - self.n_first) as usize];
        let max = w.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = w.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        max - min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationWindow {
    pub n1: u64,
    pub n2: u64,
    pub osc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationReport {
    pub windows: Vec<OscillationWindow>,
    pub max_osc: f64,
    pub min_osc: f64,
    pub threshold: f64,
    pub oscillating: bool,
}

/// Oscillation of the real part of running averages over the dyadic
/// windows `[2^k, 2^{k+1}]` that meet `[n_lo, n_hi]`.
pub fn cesaro_diagnostic(run: &RunningAverage, n_lo: u64, n_hi: u64, threshold: f64) -> OscillationReport {
    let mut windows = Vec::new();
    let hi = n_hi.min(run.n_last());
    for k in 0..63 {
        let (a, b) = (1u64 << k, 1u64 << (k + 1));
        if a > hi {
            break;
        }
        if b < n_lo.max(run.n_first) {
            continue;
        }
        let (n1, n2) = (a.max(n_lo), b.min(hi));
        windows.push(OscillationWindow { n1, n2, osc: run.osc(n1, n2) });
    }
    let max_osc = windows.iter().map(|w| w.osc).fold(0.0, f64::max);
    let min_osc = windows.iter().map(|w| w.osc).fold(f64::INFINITY, f64::min);
    OscillationReport {
        windows,
        max_osc,
        min_osc: if min_osc.is_finite() { min_osc } else { 0.0 },
        threshold,
        oscillating: max_osc > threshold,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VdcReport {
    /// `‖E_{n≤N} v_n‖²`.
    pub lhs: f64,
    /// `E_{1≤h≤H} b_h` with `b_h = |E_{n≤N} ⟨v_{n+h}, v_n⟩|`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Finite version of the van der Corput inequality `lhs ≤ 4·rhs` for
/// vectors `v[0..N+H]` in `C^d`.
pub fn vdc_check(v: &[Vec<Complex64>], h_max: usize, n: usize, slack: f64) -> Result<VdcReport> {
    if n == 0 || h_max == 0 || v.len() < n + h_max {
        return Err(Error::Config(format!("need N + H = {} vectors, got {}", n + h_max, v.len())));
    }
    let d = v[0].len();
    if v.iter().any(|x| x.len() != d) {
        return Err(Error::ShapeMismatch("vectors of different lengths".into()));
    }
    let mean: Vec<Complex64> = (0..d)
        .map(|j| v[..n].iter().map(|x| x[j]).collect::<ComplexSum>().value() / n as f64)
        .collect();
    let lhs = mean.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    };
    let rhs = (1..=h_max)
        .map(|h| {
            let s: ComplexSum = (0..n).map(|i| inner(&v[i + h], &v[i])).collect();
            s.value().norm() / n as f64
        })
        .sum::<f64>()
        / h_max as f64;
    Ok(VdcReport { lhs, rhs, slack, holds: lhs <= 4.0 * rhs + slack })
}

/// `(N, |E_{n≤N} V([a(n)]) − E_{n≤N} V(n)|)` along the schedule.
pub fn change_var_check(
    a: &HardyNormalForm,
    v: &(dyn Fn(i64) -> Complex64 + Sync),
    schedule: &[u64],
) -> Result<Vec<(u64, f64)>> {
    let g = a.leading_growth().ok_or_else(|| Error::GrowthOutOfRange("zero function".into()))?;
    let sublinear = g < Growth::power(1) && g.alpha.is_positive();
    if !sublinear || !a.leading_coeff().is_some_and(|c| c.is_positive()) {
        return Err(Error::GrowthOutOfRange(format!("{a} is not between t^ε and t")));
    }
    let n_max = schedule.iter().copied().max().unwrap_or(0);
    let lo = if a.terms().iter().any(|t| t.beta < 0) { 2 } else { 1 };
    let seq = floor_seq(a, lo, n_max as i64)?;
    let mut hardy = ComplexSum::default();
    let mut plain = ComplexSum::default();
    let mut out = Vec::new();
    let mut sched: Vec<u64> = schedule.to_vec();
    sched.sort_unstable();
    let mut next = sched.iter().peekable();
    for n in 1..=n_max as i64 {
        if n >= lo {
            hardy.add(v(seq.at(n)));
        }
        plain.add(v(n));
        while next.peek().is_some_and(|&&c| c as i64 == n) {
            next.next();
            let d = hardy.value() / (n - lo + 1) as f64 - plain.value() / n as f64;
            out.push((n as u64, d.norm()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::parse;
    use crate::numeric::Surd;

    fn golden() -> Surd {
        (Surd::sqrt_of(5) - Surd::one()) * Surd::from_ratio(1, 2)
    }

    fn chr(k: i64) -> Observable {
        Observable::TorusCharacter(vec![k])
    }

    #[test]
    fn algebraic_cancellation() {
        let seq = Arc::new(floor_seq(&parse("t^(3/2)").unwrap(), 1, 2000).unwrap());
        let mut spec = AverageSpec::new(
            System::rotation(vec![Surd::sqrt_of(2)]),
            vec![chr(2), chr(-1)],
            vec![IterateSeq::multiple_of(&seq, 1), IterateSeq::multiple_of(&seq, 2)],
            2000,
        );
        spec.points.truncate(16);
        let s = multi_average(&spec).unwrap();
        for c in &s.checkpoints {
            for (avg, x) in c.averages.iter().zip(&spec.points) {
                let e = evaluate(&chr(1), x).unwrap();
                assert!((avg - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn geometric_sum_oracle() {
        let alpha = golden();
        let mut spec = AverageSpec::new(
            System::rotation(vec![alpha.clone()]),
            vec![chr(1), chr(1)],
            vec![IterateSeq::linear(1), IterateSeq::linear(2)],
            5000,
        );
        spec.points.truncate(8);
        let s = multi_average(&spec).unwrap();
        let a = alpha.to_f64();
        let denom = (Complex64::new(0.0, 2.0 * std::f64::consts::PI * 3.0 * a).exp() - 1.0).norm();
        for c in &s.checkpoints {
            // |Σ_{n≤N} e(3nα)| ≤ 2/|1 − e(3α)|
            assert!(c.rms <= 2.0 / (c.n as f64 * denom) + 1e-12);
        }
    }

    #[test]
    fn constants_average_to_one() {
        let one = Observable::Constant(Complex64::new(1.0, 0.0));
        let seq = floor_seq(&parse("t*log(t)").unwrap(), 1, 300).unwrap();
        let spec = AverageSpec::new(
            System::heisenberg([golden(), Surd::sqrt_of(2), Surd::zero()]),
            vec![one.clone(), one],
            vec![IterateSeq::floor(seq), IterateSeq::linear(3)],
            300,
        );
        let s = multi_average(&spec).unwrap();
        assert!(s.checkpoints.iter().all(|c| c.averages.iter().all(|z| *z == Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn serial_matches_parallel() {
        let mut spec = AverageSpec::new(
            System::rotation(vec![golden()]),
            vec![chr(1), chr(3)],
            vec![IterateSeq::linear(1), IterateSeq::linear(5)],
            1000,
        );
        let a = multi_average(&spec).unwrap();
        spec.serial = true;
        assert_eq!(a, multi_average(&spec).unwrap());
    }

    #[test]
    fn furstenberg_trivial() {
        let one = Observable::Constant(Complex64::new(1.0, 0.0));
        let c = furstenberg_compare(
            &System::rotation(vec![golden()]),
            &[one.clone(), one],
            &parse("t^(3/2)").unwrap(),
            500,
            None,
            false,
        )
        .unwrap();
        assert!(c.differences.iter().all(|(_, d)| *d == 0.0));
        let err = furstenberg_compare(
            &System::rotation(vec![golden()]),
            &[chr(1)],
            &parse("2*t + log(t)").unwrap(),
            10,
            None,
            false,
        );
        assert!(matches!(err, Err(Error::RequiresCond1(_))));
    }

    #[test]
    fn recurrence_trivial_and_fourier() {
        let s = recurrence_average(
            &System::cyclic(2).unwrap(),
            &TargetSet::Cyclic(vec![0]),
            &[IterateSeq::linear(2)],
            100,
            &[10, 100],
            DEFAULT_GRID,
        )
        .unwrap();
        assert!(s.running.values.iter().all(|v| v.re == 0.5));
        assert_eq!(s.lower_bound, 0.25);
        let s = recurrence_average(
            &System::rotation(vec![golden()]),
            &TargetSet::arc(0.0, 0.5),
            &[IterateSeq::linear(1)],
            20000,
            &dyadic_checkpoints(20000),
            DEFAULT_GRID,
        )
        .unwrap();
        // μ(A ∩ (A − s)) = 1/2 − ‖s‖, which averages to 1/4 along nα.
        assert!((s.last() - 0.25).abs() < 1e-3);
    }

    #[test]
    fn arc_intersections() {
        assert!((arcs_intersection(&[(0.0, 0.5), (0.25, 0.5)]) - 0.25).abs() < 1e-15);
        assert!((arcs_intersection(&[(0.0, 0.5), (0.75, 0.5)]) - 0.25).abs() < 1e-15);
        assert!((arcs_intersection(&[(0.9, 0.2), (0.0, 0.05)]) - 0.05).abs() < 1e-12);
        assert_eq!(arcs_intersection(&[(0.0, 0.25), (0.5, 0.25)]), 0.0);
    }

    #[test]
    fn vdc_examples() {
        let c = Complex64::new(0.6, 0.8);
        let v: Vec<Vec<Complex64>> = vec![vec![c]; 120];
        let r = vdc_check(&v, 20, 100, 0.0).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12 && r.holds);
        let a = golden().to_f64();
        let v: Vec<Vec<Complex64>> = (0..1100)
            .map(|n| vec![Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a * n as f64)])
            .collect();
        let r = vdc_check(&v, 100, 1000, 0.05).unwrap();
        assert!(r.lhs < 1e-4 && r.holds);
    }

    #[test]
    fn change_var() {
        let a = parse("t^(1/2)").unwrap();
        let d = change_var_check(&a, &|_| Complex64::new(2.0, 0.0), &[10, 100]).unwrap();
        assert!(d.iter().all(|(_, x)| *x < 1e-15));
        assert!(matches!(
            change_var_check(&parse("t^2").unwrap(), &|_| Complex64::new(1.0, 0.0), &[10]),
            Err(Error::GrowthOutOfRange(_))
        ));
        assert!(change_var_check(&parse("log(t)").unwrap(), &|_| Complex64::new(1.0, 0.0), &[10]).is_err());
    }

    #[test]
    fn oscillation() {
        let alt = RunningAverage::from_terms((1..=10_000).map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)));
        assert!(alt.osc(1000, 10_000) <= 2e-3);
        let flat = RunningAverage::from_terms(std::iter::repeat_n(Complex64::new(0.3, 0.0), 100));
        let r = cesaro_diagnostic(&flat, 1, 100, DEFAULT_OSC_THRESHOLD);
        assert!(r.max_osc < 1e-15 && !r.oscillating);
    }
}
