#![allow(dead_code)]

use hardyerg::numeric::Surd;
use hardyerg::pet::{parse_family, poly_type, PolyFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (√5 − 1)/2.
pub fn golden() -> Surd {
    (Surd::sqrt_of(5) - Surd::one()) * Surd::from_ratio(1, 2)
}

/// Random integer polynomial of degree `d` with coefficients in −3..=3 and
/// nonzero leading coefficient, written in the input grammar.
pub fn random_poly(rng: &mut ChaCha8Rng, d: u32) -> String {
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

/// `count` non-degenerate families of degree ≤ 4 and size ≤ 5.
pub fn poly_corpus(seed: u64, count: usize) -> Vec<(String, PolyFamily)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let size = rng.gen_range(1..=5);
        let members: Vec<String> = (0..size)
            .map(|_| {
                let d = rng.gen_range(1..=4);
                random_poly(&mut rng, d)
            })
            .collect();
        let text = members.join(", ");
        let fam = parse_family(&text).unwrap();
        if poly_type(&fam).is_ok() {
            out.push((text, fam));
        }
    }
    out
}
