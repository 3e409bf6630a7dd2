use std::collections::BTreeMap;

use hardyerg::averages::{
    cesaro_diagnostic, dyadic_checkpoints, furstenberg_compare, multi_average, recurrence_average,
    running_average, AverageSpec, IterateSeq,
};
use hardyerg::equidist::frequency_search;
use hardyerg::hardy::{classify_convergence, classify_recurrence, in_class_g, parse, HardyNormalForm};
use hardyerg::numeric::{Phase, Surd};
use hardyerg::pet::{
    derivation_tree, hardy_type, hardy_vdc, parse_family, poly_type, poly_vdc, Family, FamilyKind, TypeVector,
};
use hardyerg::seminorms::{gowers_bruteforce, product_identity_check, seminorm_recursive};
use hardyerg::sequences::{floor_seq, star_discrepancy_1d};
use hardyerg::systems::{grid, iterate, Observable, Point, System};
use hardyerg::taylor::{reduction_plan, taylor_window_check};
use hardyerg::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::describe;
use crate::report::{Report, Table, Verdict};
use crate::CliError;

const DEFAULT_N: u64 = 10_000;
const DEFAULT_GRID: usize = 256;
const MAX_DEPTH: usize = 64;

fn required<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::usage(format!("missing {what}")))
}

fn observables(cfg: &RunConfig) -> Result<Vec<Observable>, CliError> {
    let list = required(&cfg.observables, "observables (--obs)")?;
    list.iter().map(|s| describe::observable(s)).collect()
}

fn system_or_golden(cfg: &RunConfig) -> Result<System, CliError> {
    describe::system(cfg.system.as_deref().unwrap_or("rotation(golden)"))
}

/// `[a(n)]` from the first index where `a` is defined up to `n_max`.
fn floor_sequence(a: &HardyNormalForm, n_max: u64) -> Result<IterateSeq, CliError> {
    let lo = if a.terms().iter().any(|t| t.beta < 0) { 2 } else { 1 };
    Ok(IterateSeq::floor(floor_seq(a, lo, n_max as i64)?))
}

fn sequences(cfg: &RunConfig, n_max: u64) -> Result<Vec<IterateSeq>, CliError> {
    let list = required(&cfg.sequences, "sequences (--seq)")?;
    list.iter().map(|s| floor_sequence(&parse(s)?, n_max)).collect()
}

fn checkpoints(cfg: &RunConfig, n: u64) -> Vec<u64> {
    cfg.checkpoints.clone().unwrap_or_else(|| dyadic_checkpoints(n))
}

fn sci(x: f64) -> Value {
    json!(x)
}

pub fn classify(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut table = Table::new(&["expression", "class", "recurrence", "in_G"]);
    let exprs = cfg.expressions.clone().unwrap_or_default();
    for e in &exprs {
        let a = parse(e)?;
        table.push(vec![
            json!(e),
            json!(classify_convergence(&a).to_string()),
            json!(format!("{:?}", classify_recurrence(&a))),
            json!(in_class_g(&a)),
        ]);
    }
    Ok(Report::new("classify", cfg, table))
}

/// Aligned text rendering of the classification table.
pub fn classify_text(r: &Report) -> String {
    let t = &r.checkpoints;
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let mut rows: Vec<Vec<String>> = vec![t.columns.iter().map(|c| c.to_string()).collect()];
    rows.extend(t.rows.iter().map(|r| r.iter().map(cell).collect()));
    let widths: Vec<usize> =
        (0..t.columns.len()).map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
    rows.iter()
        .map(|r| {
            let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            line.join("  ").trim_end().to_string() + "\n"
        })
        .collect()
}

pub fn avg(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.compare.is_some() {
        avg_compare(cfg)
    } else if cfg.oscillation.unwrap_or(false) {
        avg_oscillation(cfg)
    } else {
        avg_plain(cfg)
    }
}

fn avg_compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let system = system_or_golden(cfg)?;
    let obs = observables(cfg)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let tol = cfg.tolerance.unwrap_or(0.05);
    let a = parse(required(&cfg.compare, "comparison sequence")?)?;
    let points = grid(&system, cfg.grid.unwrap_or(DEFAULT_GRID));
    let cmp = furstenberg_compare(&system, &obs, &a, n, Some(points), cfg.serial())?;
    let mut table = Table::new(&["N", "difference", "hardy_rms", "furstenberg_rms"]);
    for ((c, d), (h, l)) in cmp.differences.iter().zip(cmp.hardy.checkpoints.iter().zip(&cmp.linear.checkpoints)) {
        table.push(vec![json!(c), sci(*d), sci(h.rms), sci(l.rms)]);
    }
    let last = cmp.differences.last().map_or(f64::NAN, |p| p.1);
    let max_in = |lo: u64, hi: u64| {
        cmp.differences.iter().filter(|(c, _)| *c >= lo && *c < hi).map(|p| p.1).fold(f64::NAN, f64::max)
    };
    let (early, late) = (max_in(1 << 10, n / 8), max_in(n / 8, n + 1));
    let mut r = Report::new("avg", cfg, table);
    r.verdict(Verdict::new(
        format!("Hardy averages along multiples of [{a}] approach the Furstenberg averages"),
        last <= tol,
        format!("max difference over the grid at N = {n}: {last:.3e}"),
    ));
    r.verdict(Verdict::new(
        "the difference decreases along the checkpoints",
        late < early,
        format!("max over [2^10, N/8): {early:.3e}, max over [N/8, N]: {late:.3e}"),
    ));
    if let Some(s) = cmp.log_slope(1 << 10) {
        r.data = Some(json!({ "log_log_slope": s }));
    }
    r.tolerance("difference", tol);
    Ok(r)
}

fn avg_oscillation(cfg: &RunConfig) -> Result<Report, CliError> {
    let system = system_or_golden(cfg)?;
    let obs = observables(cfg)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let threshold = cfg.threshold.unwrap_or(0.1);
    let spec = AverageSpec::new(system.clone(), obs, sequences(cfg, n)?, n);
    let run = running_average(&spec, &system.origin())?;
    let rep = cesaro_diagnostic(&run, cfg.from.unwrap_or(1), n, threshold);
    let mut table = Table::new(&["N1", "N2", "oscillation"]);
    for w in &rep.windows {
        table.push(vec![json!(w.n1), json!(w.n2), sci(w.osc)]);
    }
    let mut r = Report::new("avg", cfg, table);
    r.verdict(Verdict::new(
        "running averages at the origin oscillate on every dyadic window",
        !rep.windows.is_empty() && rep.min_osc >= threshold,
        format!("{} windows, oscillation min {:.3} max {:.3}", rep.windows.len(), rep.min_osc, rep.max_osc),
    ));
    r.tolerance("oscillation", threshold);
    Ok(r)
}

fn avg_plain(cfg: &RunConfig) -> Result<Report, CliError> {
    let system = system_or_golden(cfg)?;
    let obs = observables(cfg)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let mut spec = AverageSpec::new(system.clone(), obs.clone(), sequences(cfg, n)?, n);
    spec.points = grid(&system, cfg.grid.unwrap_or(DEFAULT_GRID));
    spec.checkpoints = checkpoints(cfg, n);
    spec.serial = cfg.serial();
    let series = multi_average(&spec)?;
    let limit: Option<Complex64> = obs.iter().map(Observable::mean).product();
    let dev = |avgs: &[Complex64]| limit.map(|l| avgs.iter().map(|z| (z - l).norm()).fold(0.0, f64::max));
    let mut table = Table::new(&["N", "mean_re", "mean_im", "rms", "max_abs", "max_dev"]);
    for c in &series.checkpoints {
        let max_abs = c.averages.iter().map(|z| z.norm()).fold(0.0, f64::max);
        table.push(vec![
            json!(c.n),
            sci(c.mean.re),
            sci(c.mean.im),
            sci(c.rms),
            sci(max_abs),
            dev(&c.averages).map_or(Value::Null, sci),
        ]);
    }
    let mut r = Report::new("avg", cfg, table);
    let bound = series.bound;
    let worst = series
        .checkpoints
        .iter()
        .flat_map(|c| c.averages.iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    r.verdict(Verdict::new(
        "averages are bounded by the product of sup norms",
        worst <= bound * (1.0 + 1e-12),
        format!("max |average| {worst:.3e}, bound {bound}"),
    ));
    if let (Some(tol), Some(l)) = (cfg.tolerance, limit) {
        let d = dev(&series.last().averages).unwrap_or(f64::NAN);
        r.verdict(Verdict::new(
            "averages approach the product of the integrals",
            d <= tol,
            format!("max over the grid of |average - {:.3}| at N = {n}: {d:.3e}", l.re),
        ));
        r.tolerance("deviation", tol);
    }
    Ok(r)
}

pub fn recur(cfg: &RunConfig) -> Result<Report, CliError> {
    let system = system_or_golden(cfg)?;
    let set = describe::target_set(required(&cfg.set, "target set (--set)")?)?;
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let tol = cfg.tolerance.unwrap_or(0.01);
    let from = cfg.from.unwrap_or(1).min(n);
    let seqs = sequences(cfg, n)?;
    let rec = recurrence_average(&system, &set, &seqs, n, &checkpoints(cfg, n), cfg.grid.unwrap_or(DEFAULT_GRID))?;
    let mut table = Table::new(&["N", "average", "lower_bound"]);
    for (c, v) in &rec.checkpoints {
        table.push(vec![json!(c), sci(*v), sci(rec.lower_bound)]);
    }
    let (last, min) = (rec.last(), rec.min_from(from));
    let ell = seqs.len();
    let mut r = Report::new("recur", cfg, table);
    r.verdict(Verdict::new(
        format!("the recurrence average at N is within tolerance of mu(A)^{}", ell + 1),
        (last - rec.lower_bound).abs() <= tol,
        format!("average {last:.5} at N = {n}, mu(A) = {}, bound {:.5}", rec.measure, rec.lower_bound),
    ));
    r.verdict(Verdict::new(
        format!("the recurrence average never drops below mu(A)^{} minus the tolerance", ell + 1),
        min >= rec.lower_bound - tol,
        format!("minimum {min:.5} over N >= {from}"),
    ));
    r.tolerance("bound", tol);
    Ok(r)
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn seminorm(cfg: &RunConfig) -> Result<Report, CliError> {
    let tol = cfg.tolerance.unwrap_or(1e-9);
    let ell = cfg.ell.unwrap_or(2);
    let mut r = if cfg.observables.is_some() { seminorm_single(cfg, ell, tol)? } else { seminorm_sweep(cfg, ell, tol)? };
    r.tolerance("agreement", tol);
    Ok(r)
}

fn seminorm_single(cfg: &RunConfig, ell: u32, tol: f64) -> Result<Report, CliError> {
    let system = describe::system(required(&cfg.system, "system (--system)")?)?;
    let obs = observables(cfg)?;
    let [f] = &obs[..] else {
        return Err(CliError::usage("seminorm takes exactly one observable"));
    };
    let n_trunc = cfg.n.unwrap_or(0);
    let brute_input = match (&system, f) {
        (System::FiniteCyclic { .. }, Observable::FiniteVector(v)) => Some(v.clone()),
        _ => None,
    };
    let mut table = Table::new(&["ell", "recursive", "brute_force", "truncation_error"]);
    let mut values = Vec::new();
    let mut worst = 0.0f64;
    for l in 1..=ell {
        let rec = seminorm_recursive(&system, f, l, n_trunc)?;
        let brute = match &brute_input {
            Some(v) => match gowers_bruteforce(v, l) {
                Ok(b) => Some(b.value),
                Err(Error::BudgetExceeded(_)) => None,
                Err(e) => return Err(e.into()),
            },
            None => None,
        };
        if let Some(b) = brute {
            worst = worst.max((b - rec.value).abs());
        }
        table.push(vec![json!(l), sci(rec.value), brute.map_or(Value::Null, sci), rec.error.map_or(Value::Null, sci)]);
        values.push(rec.value);
    }
    let mut r = Report::new("seminorm", cfg, table);
    r.verdict(Verdict::new(
        "seminorms do not decrease with the order",
        values.windows(2).all(|w| w[0] <= w[1] + tol),
        format!("{values:?}"),
    ));
    if brute_input.is_some() {
        r.verdict(Verdict::new(
            "recursive seminorms agree with brute-force Gowers norms",
            worst <= tol,
            format!("max gap {worst:.2e}"),
        ));
        let p = product_identity_check(&system, f, 1)?;
        r.verdict(Verdict::new(
            "the squared order-2 seminorm equals the order-1 seminorm of f times its conjugate",
            (p.lhs - p.rhs).abs() <= tol,
            format!("{:.12} vs {:.12}", p.lhs, p.rhs),
        ));
    }
    Ok(r)
}

fn seminorm_sweep(cfg: &RunConfig, ell: u32, tol: f64) -> Result<Report, CliError> {
    let moduli = required(&cfg.moduli, "observable (--obs) or moduli")?;
    let trials = cfg.trials.unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let mut table = Table::new(&["m", "max_gap", "max_product_gap"]);
    let (mut worst, mut worst_product) = (0.0f64, 0.0f64);
    for &m in moduli {
        let sys = System::cyclic(m)?;
        let (mut gap, mut product_gap) = (0.0f64, 0.0f64);
        for l in 1..=ell {
            for _ in 0..trials {
                let f = random_vector(&mut rng, m as usize);
                let brute = gowers_bruteforce(&f, l)?.value;
                let rec = seminorm_recursive(&sys, &Observable::FiniteVector(f), l, 0)?.value;
                gap = gap.max((brute - rec).abs());
            }
        }
        for l in 1..=ell.saturating_sub(1).max(1) {
            for _ in 0..trials.div_ceil(20) {
                let f = Observable::FiniteVector(random_vector(&mut rng, m as usize));
                let p = product_identity_check(&sys, &f, l)?;
                product_gap = product_gap.max((p.lhs - p.rhs).abs());
            }
        }
        table.push(vec![json!(m), sci(gap), sci(product_gap)]);
        worst = worst.max(gap);
        worst_product = worst_product.max(product_gap);
    }
    let mut r = Report::new("seminorm", cfg, table);
    r.verdict(Verdict::new(
        "recursive seminorms agree with brute-force Gowers norms",
        worst <= tol,
        format!("{} moduli, orders 1..={ell}, {trials} random functions each: max gap {worst:.2e}", moduli.len()),
    ));
    r.verdict(Verdict::new(
        "the squared order-(l+1) seminorm equals the order-l seminorm of f times its conjugate",
        worst_product <= tol,
        format!("max gap {worst_product:.2e}"),
    ));
    Ok(r)
}

fn family(cfg: &RunConfig) -> Result<Family, CliError> {
    Ok(parse_family(&describe::family_text(required(&cfg.family, "family")?))?)
}

fn kind(cfg: &RunConfig) -> FamilyKind {
    if cfg.hardy.unwrap_or(false) {
        FamilyKind::Hardy
    } else {
        FamilyKind::Polynomial
    }
}

fn family_type(f: &Family, kind: FamilyKind) -> Result<TypeVector, CliError> {
    Ok(match kind {
        FamilyKind::Polynomial => poly_type(f)?,
        FamilyKind::Hardy => hardy_type(f)?,
    })
}

/// Types of the family and, with a pivot, of its van der Corput step.
pub fn pet_type(cfg: &RunConfig) -> Result<(Report, Vec<TypeVector>), CliError> {
    let f = family(cfg)?;
    let kind = kind(cfg);
    let mut types = vec![family_type(&f, kind)?];
    let mut table = Table::new(&["step", "type", "members"]);
    table.push(vec![json!(0), json!(types[0].to_string()), json!(f.labels().join(", "))]);
    if let Some(p) = cfg.pivot {
        if p >= f.len() {
            return Err(CliError::usage(format!("pivot {p} out of range for {} members", f.len())));
        }
        let next = match kind {
            FamilyKind::Polynomial => poly_vdc(&f, p)?,
            FamilyKind::Hardy => hardy_vdc(&f, p)?,
        };
        types.push(family_type(&next, kind)?);
        table.push(vec![json!(1), json!(types[1].to_string()), json!(next.labels().join(", "))]);
    }
    let mut r = Report::new("pet-type", cfg, table);
    if let Some(expect) = &cfg.expect {
        let got: Vec<String> = types.iter().map(ToString::to_string).collect();
        r.verdict(Verdict::new("types match the expected vectors", &got == expect, got.join(" -> ")));
    }
    Ok((r, types))
}

/// Random integer polynomial of degree `d`, coefficients in −3..=3.
fn random_poly(rng: &mut ChaCha8Rng, d: u32) -> String {
    let mut terms = Vec::new();
    for k in (0..=d).rev() {
        let mut c: i64 = rng.gen_range(-3..=3);
        if k == d && c == 0 {
            c = 1;
        }
        if c != 0 {
            terms.push(format!("{c}*t^{k}"));
        }
    }
    terms.join(" + ")
}

/// `count` families of at most 5 polynomials of degree at most 4 whose
/// type is defined.
pub fn poly_corpus(seed: u64, count: usize) -> Result<Vec<(String, Family)>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let size = rng.gen_range(1..=5);
        let members: Vec<String> = (0..size)
            .map(|_| {
                let d = rng.gen_range(1..=4);
                random_poly(&mut rng, d)
            })
            .collect();
        let text = members.join(", ");
        let fam = parse_family(&text)?;
        if poly_type(&fam).is_ok() {
            out.push((text, fam));
        }
    }
    Ok(out)
}

pub fn pet_tree(cfg: &RunConfig) -> Result<(Report, Option<String>), CliError> {
    if cfg.family.is_none() {
        return Ok((pet_corpus(cfg)?, None));
    }
    let f = family(cfg)?;
    let mut table = Table::new(&["depth", "type", "members", "pivot"]);
    let mut r;
    let text = match derivation_tree(&f, kind(cfg)) {
        Ok(tree) => {
            let mut node = Some(&tree.root);
            while let Some(n) = node {
                table.push(vec![
                    json!(n.depth),
                    json!(n.ty.to_string()),
                    json!(n.members.join(", ")),
                    n.pivot.as_ref().map_or(Value::Null, |p| json!(p)),
                ]);
                node = n.children.first();
            }
            let types = tree.types();
            r = Report::new("pet-tree", cfg, table);
            r.verdict(Verdict::new(
                "types decrease strictly along the derivation",
                types.windows(2).all(|w| w[1] < w[0]),
                types.iter().map(ToString::to_string).collect::<Vec<_>>().join(" > "),
            ));
            r.verdict(Verdict::new(
                format!("the derivation stops within depth {MAX_DEPTH}"),
                tree.depth <= MAX_DEPTH,
                format!("depth {}, largest family {}", tree.depth, tree.max_family),
            ));
            r.data = Some(serde_json::to_value(&tree).expect("tree serializes"));
            Some(tree.to_text())
        }
        Err(e @ (Error::NonTermination(_) | Error::FamilyTooLarge { .. } | Error::HypothesisFailed(_))) => {
            r = Report::new("pet-tree", cfg, table);
            r.verdict(Verdict::new(format!("the derivation stops within depth {MAX_DEPTH}"), false, e.to_string()));
            None
        }
        Err(e) => return Err(e.into()),
    };
    r.tolerance("max_depth", MAX_DEPTH as f64);
    Ok((r, text))
}

fn pet_corpus(cfg: &RunConfig) -> Result<Report, CliError> {
    let count = cfg.count.unwrap_or(50);
    let corpus = poly_corpus(cfg.seed.unwrap_or(0), count)?;
    let mut table = Table::new(&["family", "outcome", "depth"]);
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for (text, fam) in &corpus {
        let (outcome, depth) = match derivation_tree(fam, FamilyKind::Polynomial) {
            Ok(t) => ("terminated", json!(t.depth)),
            Err(Error::NonTermination(_)) => ("depth exceeded", Value::Null),
            Err(Error::FamilyTooLarge { .. }) => ("family too large", Value::Null),
            Err(Error::HypothesisFailed(_)) => ("type did not decrease", Value::Null),
            Err(e) => return Err(e.into()),
        };
        *tally.entry(outcome).or_default() += 1;
        table.push(vec![json!(text), json!(outcome), depth]);
    }
    let n = |k: &str| tally.get(k).copied().unwrap_or(0);
    let mut r = Report::new("pet-tree", cfg, table);
    r.verdict(Verdict::new(
        "every van der Corput step lowers the type",
        n("type did not decrease") == 0,
        format!("{} of {count} families had a non-decreasing step", n("type did not decrease")),
    ));
    r.verdict(Verdict::new(
        format!("every derivation stops within depth {MAX_DEPTH}"),
        n("terminated") == count,
        format!(
            "{} terminated, {} exceeded the depth, {} exceeded the member cap",
            n("terminated"),
            n("depth exceeded"),
            n("family too large")
        ),
    ));
    r.tolerance("max_depth", MAX_DEPTH as f64);
    Ok(r)
}

pub fn taylor(cfg: &RunConfig) -> Result<Report, CliError> {
    let exprs = required(&cfg.expressions, "expressions")?;
    let at = cfg.at.clone().unwrap_or_else(|| vec![10_000, 100_000, 1_000_000]);
    let mut table =
        Table::new(&["expression", "N", "L", "k", "errors", "max_remainder", "remainder_bound", "passed"]);
    let mut failures = Vec::new();
    for e in exprs {
        let a = parse(e)?;
        let plan = match reduction_plan(&a) {
            Ok(p) => p,
            Err(err @ (Error::HypothesisFailed(_) | Error::GrowthOutOfRange(_))) => {
                failures.push(format!("{e}: {err}"));
                continue;
            }
            Err(err) => return Err(err.into()),
        };
        for &n in &at {
            let l = plan.window.length_at(n);
            let rep = taylor_window_check(&a, n, plan.k, l)?;
            let errors: Vec<String> = rep.histogram.iter().map(|(k, c)| format!("{k}:{c}")).collect();
            table.push(vec![
                json!(e),
                json!(n),
                json!(l),
                json!(plan.k),
                json!(errors.join(" ")),
                sci(rep.max_remainder),
                sci(rep.remainder_bound),
                json!(rep.passed),
            ]);
            if !(rep.passed && rep.max_remainder < 1.0) {
                failures.push(format!("{e} at N = {n}"));
            }
        }
    }
    let rows = table.rows.len();
    let mut r = Report::new("taylor", cfg, table);
    r.verdict(Verdict::new(
        "floors match the Taylor polynomial up to errors in {0, sign of the next derivative}",
        failures.is_empty(),
        if failures.is_empty() { format!("{rows} windows") } else { failures.join("; ") },
    ));
    r.tolerance("remainder", 1.0);
    Ok(r)
}

pub fn equidist(cfg: &RunConfig) -> Result<Report, CliError> {
    let system = describe::system(required(&cfg.system, "affine system (--system)")?)?;
    let System::AffineTorus(t) = &system else {
        return Err(CliError::usage("equidist needs an affine(...) system"));
    };
    let d = t.d();
    let x: Vec<Surd> = match &cfg.point {
        Some(p) => p.iter().map(|s| describe::surd(s)).collect::<Result<_, _>>()?,
        None => vec![Surd::zero(); d],
    };
    if x.len() != d {
        return Err(CliError::usage(format!("point has {} coordinates, the torus has {d}", x.len())));
    }
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let m = cfg.bound.unwrap_or(5);
    if m < 1 {
        return Err(CliError::usage("frequency bound must be positive"));
    }
    let threshold = cfg.threshold.unwrap_or(10.0);
    let degree = cfg.degree.unwrap_or(d);
    let flagged = cfg.tolerance.unwrap_or(0.2);
    let start = Point::Torus(x.iter().map(Phase::from_surd).collect());
    let orbit: Vec<Vec<Phase>> = (1..=n as i64)
        .map(|k| match iterate(&system, &start, k)? {
            Point::Torus(v) => Ok(v),
            _ => unreachable!("affine orbits stay on the torus"),
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new(&["kappa", "discrepancy"]);
    let mut worst = (0.0f64, Vec::new());
    let side = 2 * m + 1;
    for idx in 0..side.pow(d as u32) {
        let mut kappa = vec![0i64; d];
        let mut rest = idx;
        for c in (0..d).rev() {
            kappa[c] = rest % side - m;
            rest /= side;
        }
        if kappa.iter().all(|&k| k == 0) {
            continue;
        }
        let pts: Vec<f64> = orbit
            .iter()
            .map(|v| v.iter().zip(&kappa).map(|(p, &k)| p.mul_i128(k as i128)).sum::<Phase>().to_f64())
            .collect();
        let disc = star_discrepancy_1d(&pts);
        let label = format!("{kappa:?}");
        table.push(vec![json!(label), sci(disc)]);
        if disc > worst.0 {
            worst = (disc, kappa);
        }
    }
    let hit = frequency_search(t, &x, degree, n, m, threshold)?;
    let mut r = Report::new("equidist", cfg, table);
    let detail = match &hit {
        Some(h) => format!("worst discrepancy {:.3} at {:?}; norm {:.3} at {:?}", worst.0, worst.1, h.norm, h.kappa),
        None => format!("worst discrepancy {:.3} at {:?}; no frequency with norm <= {threshold}", worst.0, worst.1),
    };
    r.verdict(Verdict::new(
        "a large projected discrepancy comes with a frequency of small smoothness norm",
        worst.0 <= flagged || hit.is_some(),
        detail,
    ));
    r.data = hit.map(|h| json!({ "kappa": h.kappa, "norm": h.norm }));
    r.tolerance("discrepancy", flagged);
    r.tolerance("norm", threshold);
    Ok(r)
}
