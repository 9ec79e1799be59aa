mod common;

use common::random_good_family;
use fpet_core::fpoly::{lift_to_independent, FPolyFamily, PolyMap};
use fpet_core::order::{induction_dag, precedent_steps, precedes};
use fpet_core::rational::q;
use fpet_core::Exec;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family(seed: u64) -> FPolyFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_good_family(&mut rng, 4, 3, false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn goodness_ignores_member_order(seed in any::<u64>()) {
        let f = family(seed);
        let mut members = f.members().to_vec();
        members.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let g = FPolyFamily::new(members).unwrap();
        prop_assert!(g.is_good());
        prop_assert_eq!(f.canonical(), g.canonical());
    }

    #[test]
    fn goodness_survives_invertible_maps(seed in any::<u64>()) {
        let f = family(seed);
        let n = f.ambient_dim();
        // unit upper-triangular, hence invertible
        let rows: Vec<Vec<_>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { q(1) } else if j > i { q(((i + 2 * j) % 3) as i64 - 1) } else { q(0) }).collect())
            .collect();
        let mapped: Vec<_> = f.members().iter().map(|m| m.map_linear(&rows).unwrap()).collect();
        prop_assert!(FPolyFamily::new(mapped).unwrap().is_good());
    }

    #[test]
    fn lifted_families_are_good_and_reexpand(
        coeffs in prop::collection::vec(prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 1..=3), 1..=3)
    ) {
        let polys: Vec<PolyMap> = coeffs
            .iter()
            .map(|p| PolyMap { coeffs: p.iter().map(|u| u.iter().map(|&x| q(x)).collect()).collect() })
            .collect();
        let lifted = lift_to_independent(&polys).unwrap();
        prop_assert!(lifted.family.is_good());
        let back = lifted.reexpand().unwrap();
        for (orig, got) in polys.iter().zip(&back) {
            for (j, u) in orig.coeffs.iter().enumerate() {
                prop_assert_eq!(u, &got.coeffs[j]);
            }
            for u in &got.coeffs[orig.coeffs.len()..] {
                prop_assert!(u.iter().all(|x| *x == q(0)));
            }
        }
    }

    #[test]
    fn precedes_is_irreflexive(seed in any::<u64>()) {
        let f = family(seed);
        prop_assert!(!precedes(&f, &f).unwrap());
    }

    #[test]
    fn precedents_are_good_and_precede(seed in any::<u64>()) {
        let f = family(seed);
        for step in precedent_steps(&f).unwrap() {
            prop_assert!(step.result.is_good());
            prop_assert!(precedes(&step.result, &f).unwrap());
            prop_assert!(!precedes(&f, &step.result).unwrap());
            for second in precedent_steps(&step.result).unwrap() {
                // transitivity along two steps
                prop_assert!(precedes(&second.result, &f).unwrap());
            }
        }
    }

    #[test]
    fn precedes_is_transitive_on_random_triples(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (family(a), family(b), family(c));
        if precedes(&x, &y).unwrap() && precedes(&y, &z).unwrap() {
            prop_assert!(precedes(&x, &z).unwrap());
        }
    }

    #[test]
    fn dag_terminates_and_matches_across_modes(seed in any::<u64>()) {
        let f = family(seed);
        let serial = induction_dag(&f, 10_000, Exec::Serial).unwrap();
        let parallel = induction_dag(&f, 10_000, Exec::Parallel).unwrap();
        prop_assert_eq!(serial.to_text(), parallel.to_text());
        for e in &serial.edges {
            prop_assert!(precedes(&serial.nodes[e.to], &serial.nodes[e.from]).unwrap());
        }
    }
}
