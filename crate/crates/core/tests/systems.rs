use hardyerg::numeric::Surd;
use hardyerg::systems::{evaluate, grid, iterate, Observable, Point, System};
use num_complex::Complex64;
use proptest::prelude::*;

fn golden() -> Surd {
    (Surd::sqrt_of(5) - Surd::one()) * Surd::from_ratio(1, 2)
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    let (x, y) = (a.coords_f64(), b.coords_f64());
    x.len() == y.len() && x.iter().zip(&y).all(|(p, q)| circle_dist(*p, *q) <= tol)
}

fn systems() -> Vec<System> {
    vec![
        System::rotation(vec![Surd::from_ratio(3, 7)]),
        System::rotation(vec![golden(), Surd::sqrt_of(2)]),
        System::affine(vec![vec![1, 0], vec![1, 1]], vec![golden(), Surd::from_ratio(1, 3)]).unwrap(),
        System::affine(
            vec![vec![1, 0, 0], vec![2, 1, 0], vec![1, 3, 1]],
            vec![Surd::sqrt_of(3), golden(), Surd::from_ratio(2, 5)],
        )
        .unwrap(),
        System::heisenberg([golden(), Surd::sqrt_of(2), Surd::from_ratio(1, 5)]),
        System::cyclic(12).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterates_compose(which in 0usize..6, idx in 0usize..64, n in -5000i64..5000, m in -5000i64..5000) {
        let sys = &systems()[which];
        let x = grid(sys, 64)[idx % grid(sys, 64).len()].clone();
        let direct = iterate(sys, &x, n + m).unwrap();
        let composed = iterate(sys, &iterate(sys, &x, n).unwrap(), m).unwrap();
        if matches!(sys, System::Heisenberg(_)) {
            prop_assert!(close(&direct, &composed, 1e-12), "{:?} vs {:?}", direct, composed);
        } else {
            prop_assert_eq!(direct, composed);
        }
    }

    #[test]
    fn observables_are_bounded(which in 0usize..6, idx in 0usize..64, n in -1000i64..1000) {
        let sys = &systems()[which];
        let obs = match sys {
            System::Heisenberg(_) => Observable::HeisenbergHorizontalCharacter(2, -3),
            System::FiniteCyclic { m } => Observable::FiniteVector(
                (0..*m).map(|k| Complex64::new(k as f64 / 6.0 - 1.0, 0.5)).collect(),
            ),
            _ if sys.dim() == 2 => Observable::TrigPolynomial(vec![
                (Complex64::new(0.5, 0.0), vec![1, 0]),
                (Complex64::new(0.0, -1.5), vec![2, -1]),
            ]),
            _ => Observable::TorusCharacter(vec![1; sys.dim()]),
        };
        let pts = grid(sys, 64);
        let x = iterate(sys, &pts[idx % pts.len()], n).unwrap();
        let v = evaluate(&obs, &x).unwrap();
        prop_assert!(v.norm() <= obs.sup_norm() + 1e-12);
        for c in x.coords_f64() {
            prop_assert!(c >= 0.0 && (c < 1.0 || matches!(x, Point::Cyclic(_))));
        }
    }
}

/// Reduction to `[0,1)^3` by right multiplication with lattice elements.
fn reduce(x: f64, y: f64, z: f64) -> [f64; 3] {
    let (fx, fy) = (x.floor(), y.floor());
    let xr = x - fx;
    let z = z - xr * fy;
    [xr, y - fy, z - z.floor()]
}

#[test]
fn heisenberg_closed_form_matches_group_law() {
    let beta = [golden(), Surd::sqrt_of(2), Surd::from_ratio(1, 5)];
    let b: Vec<f64> = beta.iter().map(Surd::to_f64).collect();
    let sys = System::heisenberg(beta);
    for start in grid(&sys, 8) {
        let c = start.coords_f64();
        let mut p = [c[0], c[1], c[2]];
        for n in 1..=64 {
            // b · p = (b1 + x, b2 + y, b3 + z + b1 y)
            p = reduce(b[0] + p[0], b[1] + p[1], b[2] + p[2] + b[0] * p[1]);
            let q = iterate(&sys, &start, n).unwrap().coords_f64();
            for i in 0..3 {
                assert!(circle_dist(p[i], q[i]) <= 1e-12, "n = {n}: {p:?} vs {q:?}");
            }
        }
    }
}

#[test]
fn haar_measure_is_preserved() {
    let cases: Vec<(System, Vec<(f64, f64)>)> = vec![
        (systems()[2].clone(), vec![(0.1, 0.5), (0.3, 0.55)]),
        (systems()[3].clone(), vec![(0.0, 0.6), (0.2, 0.9), (0.5, 0.75)]),
        (systems()[4].clone(), vec![(0.0, 0.5), (0.25, 0.75), (0.1, 0.6)]),
    ];
    let count = 10_000;
    for (sys, bx) in cases {
        let p: f64 = bx.iter().map(|(lo, hi)| hi - lo).product();
        let inside = |x: &Point| x.coords_f64().iter().zip(&bx).all(|(c, (lo, hi))| c >= lo && c < hi);
        let hits = grid(&sys, count)
            .iter()
            .filter(|x| inside(&iterate(&sys, x, 17).unwrap()))
            .count() as f64;
        let sigma = (p * (1.0 - p) / count as f64).sqrt();
        let freq = hits / count as f64;
        assert!((freq - p).abs() < 3.0 * sigma, "{}: {freq} vs {p}", sys.name());
    }
}

#[test]
fn shapes_are_checked() {
    assert!(System::affine(vec![vec![2, 0], vec![0, 1]], vec![Surd::zero(), Surd::zero()]).is_err());
    assert!(System::cyclic(0).is_err());
    let rot = System::rotation(vec![golden()]);
    assert!(iterate(&rot, &Point::Cyclic(0), 1).is_err());
    assert!(evaluate(&Observable::TorusCharacter(vec![1, 2]), &rot.origin()).is_err());
}
