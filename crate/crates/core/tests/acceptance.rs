//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Exits 0 so the workspace test run completes; set `ACCEPTANCE_STRICT=1`
//! to turn any FAIL into a non-zero exit status.

mod common;

use std::time::{Duration, Instant};

use hardyerg::averages::{
    cesaro_diagnostic, dyadic_checkpoints, furstenberg_compare, multi_average, recurrence_average,
    running_average, vdc_check, AverageSpec, IterateSeq, TargetSet,
};
use hardyerg::hardy::{classify_convergence, parse};
use hardyerg::numeric::Phase;
use hardyerg::pet::{
    derivation_tree, hardy_type, hardy_vdc, parse_family, poly_type, poly_vdc, FamilyKind, TypeVector,
};
use hardyerg::seminorms::{gowers_bruteforce, product_identity_check, seminorm_recursive};
use hardyerg::sequences::floor_seq;
use hardyerg::systems::{Observable, System};
use hardyerg::taylor::{reduction_plan, taylor_window_check};
use hardyerg::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn tv(v: &[u64]) -> TypeVector {
    TypeVector(v.to_vec())
}

fn c1_pet_goldens() -> Outcome {
    let fam = |s: &str| parse_family(s).unwrap();
    let mut bad = Vec::new();
    let base = fam("t, 2*t, t^2");
    let got = poly_type(&base).unwrap();
    if got != tv(&[2, 1, 2]) {
        bad.push(format!("poly_type {got}"));
    }
    let got = poly_type(&poly_vdc(&base, 0).unwrap()).unwrap();
    if got != tv(&[2, 1, 1]) {
        bad.push(format!("poly_vdc {got}"));
    }
    let got = hardy_type(&fam("t^(1/3), t^(5/2), t^(5/2) + t^(1/2), t^(5/2) + t^(7/3)")).unwrap();
    if got != tv(&[2, 2, 0, 1]) {
        bad.push(format!("hardy_type {got}"));
    }
    let h = fam("t^(1/3), t^(1/2), t^(3/2)");
    let before = hardy_type(&h).unwrap();
    let after = hardy_type(&hardy_vdc(&h, 0).unwrap()).unwrap();
    if before != tv(&[1, 1, 2]) || after != tv(&[1, 1, 1]) {
        bad.push(format!("hardy_vdc {before} -> {after}"));
    }
    outcome(bad.is_empty(), if bad.is_empty() { "(2,1,2) (2,1,1) (2,2,0,1) (1,1,1)".into() } else { bad.join("; ") })
}

fn c2_classifier() -> Outcome {
    let table = [
        ("t*log(t)", "GoodCond1"),
        ("t^3/log(t)", "GoodCond1"),
        ("t^2 + t*log(t)", "GoodCond1"),
        ("t^2 + sqrt(3)*t", "GoodCond1"),
        ("t^2 + log(t)^2", "GoodCond1"),
        ("sqrt(5)*t^2", "GoodCond2"),
        ("1/2*t + log(t)", "GoodCond3"),
        ("sqrt(5)*t^2 + log(t)", "Bad"),
        ("2*t + log(t)", "Bad"),
    ];
    let wrong: Vec<String> = table
        .iter()
        .filter_map(|(s, want)| {
            let got = classify_convergence(&parse(s).unwrap());
            (got.name() != *want).then(|| format!("{s}: {got}"))
        })
        .collect();
    outcome(wrong.is_empty(), if wrong.is_empty() { "9/9 rows".into() } else { wrong.join("; ") })
}

fn c3_type_decrease() -> Outcome {
    let corpus = common::poly_corpus(7, 500);
    let (mut terminated, mut nonterm, mut too_large, mut increase) = (0, 0, 0, 0);
    let mut max_depth = 0;
    for (text, fam) in &corpus {
        match derivation_tree(fam, FamilyKind::Polynomial) {
            Ok(t) => {
                terminated += 1;
                max_depth = max_depth.max(t.depth);
            }
            Err(Error::NonTermination(_)) => nonterm += 1,
            Err(Error::FamilyTooLarge { .. }) => too_large += 1,
            Err(Error::HypothesisFailed(m)) => {
                increase += 1;
                eprintln!("  type did not decrease for {{{text}}}: {m}");
            }
            Err(e) => panic!("{text}: {e}"),
        }
    }
    outcome(
        increase == 0 && nonterm == 0 && too_large == 0,
        format!(
            "{} families: {terminated} terminated (max depth {max_depth}), {nonterm} need depth > 64, \
             {too_large} exceeded the member cap, {increase} non-decreasing transforms",
            corpus.len()
        ),
    )
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn c4_seminorms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut worst_product = 0.0f64;
    for m in 2..=32u64 {
        let sys = System::cyclic(m).unwrap();
        for ell in 1..=3 {
            for _ in 0..100 {
                let f = random_vector(&mut rng, m as usize);
                let brute = gowers_bruteforce(&f, ell).unwrap().value;
                let rec = seminorm_recursive(&sys, &Observable::FiniteVector(f), ell, 0).unwrap().value;
                worst = worst.max((brute - rec).abs());
            }
        }
        for ell in 1..=2 {
            for _ in 0..5 {
                let f = Observable::FiniteVector(random_vector(&mut rng, m as usize));
                let p = product_identity_check(&sys, &f, ell).unwrap();
                worst_product = worst_product.max((p.lhs - p.rhs).abs());
            }
        }
    }
    outcome(
        worst <= 1e-9 && worst_product <= 1e-9,
        format!("max |recursive - brute| = {worst:.2e}, max product identity gap = {worst_product:.2e}"),
    )
}

fn c5_limit_formula() -> Outcome {
    let rot = System::rotation(vec![common::golden()]);
    let n = 100_000;
    let mut lines = Vec::new();
    let mut pass = true;
    for a in ["t^(3/2)", "t*log(t)"] {
        for second in [1, -1] {
            let obs = vec![Observable::TorusCharacter(vec![1]), Observable::TorusCharacter(vec![second])];
            let cmp = furstenberg_compare(&rot, &obs, &parse(a).unwrap(), n, None, false).unwrap();
            let last = cmp.differences.last().unwrap().1;
            let max_in = |lo: u64, hi: u64| {
                cmp.differences.iter().filter(|(c, _)| *c >= lo && *c < hi).map(|p| p.1).fold(0.0, f64::max)
            };
            let early = max_in(1 << 10, n / 8);
            let late = max_in(n / 8, n + 1);
            pass &= last <= 0.05 && late < early;
            lines.push(format!("{a} (1,{second}): {last:.4} (early {early:.3}, late {late:.3})"));
        }
    }
    outcome(pass, lines.join(", "))
}

fn c6_product_splitting() -> Outcome {
    let rot = System::rotation(vec![common::golden()]);
    let n = 1_000_000;
    let seqs = ["t^(1/2)", "t^(3/2)"]
        .iter()
        .map(|s| IterateSeq::floor(floor_seq(&parse(s).unwrap(), 1, n as i64).unwrap()))
        .collect();
    let obs = vec![Observable::TorusCharacter(vec![1]), Observable::TorusCharacter(vec![1])];
    let mut spec = AverageSpec::new(rot, obs, seqs, n);
    spec.checkpoints = vec![n];
    let last = multi_average(&spec).unwrap().last().clone();
    let max = last.averages.iter().map(|z| z.norm()).fold(0.0, f64::max);
    outcome(max <= 0.05, format!("max over grid |average| = {max:.2e}, grid rms = {:.2e}", last.rms))
}

fn c7_recurrence() -> Outcome {
    let rot = System::rotation(vec![common::golden()]);
    let n = 1_000_000;
    let seqs: Vec<IterateSeq> = ["t^(1/2)", "t^(3/2)"]
        .iter()
        .map(|s| IterateSeq::floor(floor_seq(&parse(s).unwrap(), 1, n as i64).unwrap()))
        .collect();
    let r = recurrence_average(&rot, &TargetSet::arc(0.0, 0.25), &seqs, n, &dyadic_checkpoints(n), 256).unwrap();
    let target = 0.25f64.powi(3);
    let last = r.last();
    let min = r.min_from(10_000);
    outcome(
        (last - target).abs() <= 0.01 && min >= target - 0.01,
        format!("average {last:.5} at 1e6, minimum {min:.5} after 1e4, target {target}"),
    )
}

fn c8_taylor() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for a in ["t^(3/2)", "t*log(t)", "t^(5/2)"] {
        let f = parse(a).unwrap();
        let plan = reduction_plan(&f).unwrap();
        for n in [10_000i64, 100_000, 1_000_000] {
            let l = plan.window.length_at(n);
            match taylor_window_check(&f, n, plan.k, l) {
                Ok(r) => {
                    pass &= r.passed && r.max_remainder < 1.0;
                    let keys: Vec<i64> = r.histogram.keys().copied().collect();
                    lines.push(format!("{a} N={n} L={l} errors {keys:?}"));
                }
                Err(e) => {
                    pass = false;
                    lines.push(format!("{a} N={n}: {e}"));
                }
            }
        }
    }
    outcome(pass, lines.join(", "))
}

fn c9_bad_sequence() -> Outcome {
    let n = 1_000_000;
    let sys = System::cyclic(2).unwrap();
    let seq = floor_seq(&parse("2*t + log(t)").unwrap(), 1, n as i64).unwrap();
    let f = Observable::FiniteVector(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
    let spec = AverageSpec::new(sys.clone(), vec![f], vec![IterateSeq::floor(seq)], n);
    let run = running_average(&spec, &sys.origin()).unwrap();
    let rep = cesaro_diagnostic(&run, 100, n, 0.1);
    outcome(
        rep.min_osc >= 0.1,
        format!("{} dyadic windows, oscillation min {:.3} max {:.3}", rep.windows.len(), rep.min_osc, rep.max_osc),
    )
}

fn c10_vdc() -> Outcome {
    let (n, h) = (2000usize, 40usize);
    let golden = common::golden().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..100 {
        let c = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let shift: f64 = rng.gen_range(0.0..1.0);
        let families: [Vec<Vec<Complex64>>; 3] = [
            vec![vec![c]; n + h],
            (0..n + h).map(|k| vec![Phase::from_f64(k as f64 * golden + shift).e()]).collect(),
            (0..n + h)
                .map(|_| vec![Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))])
                .collect(),
        ];
        for v in &families {
            let r = vdc_check(v, h, n, 0.05).unwrap();
            worst = worst.max(r.lhs - 4.0 * r.rhs);
            failures += usize::from(!r.holds);
        }
    }
    outcome(failures == 0, format!("300 runs, {failures} violations, max lhs - 4 rhs = {worst:.3}"))
}

fn c11_floor_certification() -> Outcome {
    match floor_seq(&parse("t^(3/2)").unwrap(), 1, 1_000_000) {
        Ok(s) => {
            let squares: Vec<i64> = (1..=1000).map(|k| k * k).collect();
            let cubes_ok = squares.iter().all(|&n| s.at(n) == (n as f64).sqrt().round() as i64 * n);
            outcome(
                s.exact_path == squares && cubes_ok,
                format!("{} exact-path indices, max precision {} bits", s.exact_path.len(), s.precision_bits_used),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("PET golden types", Duration::from_secs(1), c1_pet_goldens),
        ("convergence classifier table", Duration::from_secs(1), c2_classifier),
        ("type decrease and termination", Duration::from_secs(30), c3_type_decrease),
        ("seminorm oracle equivalence", Duration::from_secs(300), c4_seminorms),
        ("Hardy vs Furstenberg limit", Duration::from_secs(120), c5_limit_formula),
        ("product splitting", Duration::from_secs(300), c6_product_splitting),
        ("recurrence lower bound", Duration::from_secs(600), c7_recurrence),
        ("Taylor windows", Duration::from_secs(60), c8_taylor),
        ("bad sequence oscillation", Duration::from_secs(60), c9_bad_sequence),
        ("van der Corput inequality", Duration::from_secs(60), c10_vdc),
        ("floor certification", Duration::from_secs(60), c11_floor_certification),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= *limit;
        failed += usize::from(!pass);
        println!(
            "{} criterion {:>2} {name}: {} [{:.1}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
