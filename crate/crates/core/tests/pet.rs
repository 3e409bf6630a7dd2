mod common;

use hardyerg::pet::{
    choose_hardy_pivot, choose_pivot, derivation_tree, hardy_type, hardy_vdc, parse_family, poly_type, poly_vdc,
    FamilyKind, TypeVector,
};
use hardyerg::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn lemma_pivots_decrease_the_type_on_the_corpus() {
    let mut steps = 0;
    for (text, _) in common::poly_corpus(7, 500) {
        // the lemma wants a member of the family degree in front
        let mut members: Vec<&str> = text.split(", ").collect();
        let degree = |m: &str| m.split(" + ").next().and_then(|t| t.rsplit('^').next()).unwrap().to_string();
        let top = (0..members.len()).max_by_key(|&i| (degree(members[i]), std::cmp::Reverse(i))).unwrap();
        let lead = members.remove(top);
        members.insert(0, lead);
        let mut cur = parse_family(&members.join(", ")).unwrap();
        let max_first = |f: &mut hardyerg::pet::Family| {
            let mut best = 0;
            for i in 1..f.len() {
                if f.members[i].form.compare_growth(&f.members[best].form).is_gt() {
                    best = i;
                }
            }
            let m = f.members.remove(best);
            f.members.insert(0, m);
        };
        let mut ty = poly_type(&cur).unwrap();
        // three steps per family keeps the corpus cheap; deeper steps are
        // exercised by the derivation trees below
        for _ in 0..3 {
            if ty.d() <= 1 || cur.len() > 200 {
                break;
            }
            max_first(&mut cur);
            let (pivot, _) = choose_pivot(&cur).unwrap();
            let next = match poly_vdc(&cur, pivot) {
                Ok(n) if n.is_empty() => break,
                Ok(n) => n,
                Err(Error::DegenerateFamily(_)) => break,
                Err(e) => panic!("{text}: {e}"),
            };
            let next_ty = poly_type(&next).unwrap();
            assert!(next_ty < ty, "{{{text}}}: {ty} -> {next_ty}");
            steps += 1;
            cur = next;
            ty = next_ty;
        }
    }
    assert!(steps > 500);
}

#[test]
fn short_derivations_terminate_with_decreasing_types() {
    for text in ["t", "t^2", "t, 2*t, t^2", "t^2, t^2 + t", "t^3", "t^2, 2*t^2, 3*t"] {
        let tree = derivation_tree(&parse_family(text).unwrap(), FamilyKind::Polynomial).unwrap();
        let types = tree.types();
        assert!(types.windows(2).all(|w| w[1] < w[0]), "{text}: {types:?}");
        assert!(tree.depth <= 64);
        assert_eq!(types.last().unwrap().d(), 1);
    }
    for text in ["t^3/2", "t^1/3, t^1/2, t^3/2", "t^1/2*log(t), t^5/2"] {
        let tree = derivation_tree(&parse_family(text).unwrap(), FamilyKind::Hardy).unwrap();
        let types = tree.types();
        assert!(types.windows(2).all(|w| w[1] < w[0]), "{text}: {types:?}");
    }
}

#[test]
fn type_vectors_order_lexicographically() {
    let tv = |v: &[u64]| TypeVector(v.to_vec());
    assert!(tv(&[2, 1, 1]) < tv(&[2, 1, 2]));
    assert!(tv(&[1, 5, 5]) < tv(&[2, 0, 0]));
    assert!(tv(&[2, 0, 1]) < tv(&[2, 1, 0]));
    assert_eq!(tv(&[2, 1, 2]).to_string(), "(2,1,2)");
}

fn corpus_member() -> impl Strategy<Value = String> {
    (any::<u64>(), 1u32..=4).prop_map(|(s, d)| common::random_poly(&mut ChaCha8Rng::seed_from_u64(s), d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn poly_type_ignores_order(members in prop::collection::vec(corpus_member(), 1..=5), rot in 0usize..5) {
        let fam = parse_family(&members.join(", ")).unwrap();
        prop_assume!(poly_type(&fam).is_ok());
        let mut shuffled = members.clone();
        shuffled.reverse();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        prop_assert_eq!(poly_type(&parse_family(&shuffled.join(", ")).unwrap()).unwrap(), poly_type(&fam).unwrap());
    }

    #[test]
    fn hardy_type_extends_poly_type(members in prop::collection::vec(corpus_member(), 1..=5)) {
        let fam = parse_family(&members.join(", ")).unwrap();
        let Ok(TypeVector(mut v)) = poly_type(&fam) else { return Ok(()); };
        v.push(0);
        prop_assert_eq!(hardy_type(&fam).unwrap(), TypeVector(v));
    }

    #[test]
    fn hardy_transforms_decrease_the_type(
        exps in prop::collection::btree_set((1i64..=15, 1i64..=4), 1..=4),
        coeffs in prop::collection::vec(1i64..=3, 4),
    ) {
        let members: Vec<String> = exps
            .iter()
            .zip(&coeffs)
            .filter(|((p, q), _)| p % q != 0)
            .map(|((p, q), c)| format!("{c}*t^({p}/{q})"))
            .collect();
        prop_assume!(!members.is_empty());
        let Ok(fam) = parse_family(&members.join(", ")) else { return Ok(()); };
        let Ok(ty) = hardy_type(&fam) else { return Ok(()); };
        let Ok((pivot, _)) = choose_hardy_pivot(&fam) else { return Ok(()); };
        match hardy_vdc(&fam, pivot) {
            Ok(next) if !next.is_empty() => {
                let next_ty = hardy_type(&next).unwrap();
                prop_assert!(next_ty < ty, "{}: {} -> {}", fam, ty, next_ty);
            }
            _ => {}
        }
    }
}
