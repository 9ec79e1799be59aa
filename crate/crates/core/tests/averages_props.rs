mod common;

use common::{random_good_family, random_system, random_trig};
use fpet_core::averages::{
    furstenberg_moment, multiple_average, symbolic_limit, AverageConfig, MomentQuery, Shift,
};
use fpet_core::interval::time_change_weights;
use fpet_core::rational::{frac, q};
use fpet_core::torus::{Phasor, TrigPoly};
use fpet_core::Exec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const ALPHAS: [f64; 8] = [0.2, 1.0 / 3.0, 0.4, 0.5, 0.6, 2.0, 3.0, 3.5];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_change_weights_have_mass_one(a in 1.0f64..1e4, len in 1.0f64..1e5, idx in 0usize..ALPHAS.len()) {
        let w = time_change_weights(ALPHAS[idx], (a, a + len)).unwrap();
        prop_assert!((w.total_mass() - 1.0).abs() < 1e-8, "mass {}", w.total_mass());
        prop_assert!(w.w0 >= 0.0 && w.kernel_mass() >= 0.0);
    }

    #[test]
    fn average_support_lies_in_minkowski_sum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_good_family(&mut rng, 2, 2, false);
        let sys = random_system(&mut rng, 2, fam.ambient_dim());
        let fs: Vec<TrigPoly> = (0..fam.len()).map(|_| random_trig(&mut rng, 2, 2, 2)).collect();
        let mut sums: BTreeSet<Vec<i64>> = [vec![0, 0]].into_iter().collect();
        for f in &fs {
            sums = sums
                .iter()
                .flat_map(|s| f.support().into_iter().map(move |c| vec![s[0] + c[0], s[1] + c[1]]))
                .collect();
        }
        let cfg = AverageConfig { tol: 1e-6, budget: 50_000_000 };
        let avg = multiple_average(&sys, &fam, &fs, (0.0, 100.0), cfg, Exec::Serial).unwrap();
        for chi in avg.value.terms.keys() {
            prop_assert!(sums.contains(chi));
        }
        for chi in symbolic_limit(&sys, &fam, &fs).unwrap().support() {
            prop_assert!(sums.contains(&chi));
        }
    }

    #[test]
    fn joining_marginals_are_haar(seed in any::<u64>(), slot in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_good_family(&mut rng, 3, 3, false);
        let sys = random_system(&mut rng, 2, fam.ambient_dim());
        let one = TrigPoly::constant(2, Phasor::one());
        let g = random_trig(&mut rng, 2, 4, 2);
        let slot = slot % (fam.len() + 1);
        let mut fs = vec![one.clone(); fam.len()];
        let f0 = if slot == 0 { g.clone() } else { fs[slot - 1] = g.clone(); one };
        let m = furstenberg_moment(&sys, &MomentQuery { f0, fs, fam, shift: None }).unwrap();
        prop_assert_eq!(m, g.coeff(&[0, 0]));
    }

    #[test]
    fn off_diagonal_flow_preserves_moments(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_good_family(&mut rng, 2, 3, false);
        let sys = random_system(&mut rng, 2, fam.ambient_dim());
        let f0 = random_trig(&mut rng, 2, 3, 2);
        let fs: Vec<TrigPoly> = (0..fam.len()).map(|_| random_trig(&mut rng, 2, 3, 2)).collect();
        let base = MomentQuery { f0, fs, fam: fam.clone(), shift: None };
        let plain = furstenberg_moment(&sys, &base).unwrap();
        for j in 1..=fam.height() {
            for t in [q(1), q(-1), frac(1, 3), frac(-1, 3), q(7)] {
                let shifted = MomentQuery { shift: Some(Shift { j, t }), ..base.clone() };
                prop_assert_eq!(&furstenberg_moment(&sys, &shifted).unwrap(), &plain);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translating_linear_orbits_acts_on_observables(seed in any::<u64>(), a in 0i64..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = loop {
            let f = random_good_family(&mut rng, 3, 1, false);
            if f.height() == 1 {
                break f;
            }
        };
        let sys = random_system(&mut rng, 2, fam.ambient_dim());
        let fs: Vec<TrigPoly> = (0..fam.len()).map(|_| random_trig(&mut rng, 2, 3, 2)).collect();
        let moved: Vec<TrigPoly> = fam
            .members()
            .iter()
            .zip(&fs)
            .map(|(m, f)| {
                let w: Vec<_> = m.coeff(1).iter().map(|x| x * q(a)).collect();
                sys.act(&w, f).unwrap()
            })
            .collect();
        let cfg = AverageConfig { tol: 1e-9, budget: 50_000_000 };
        let len = 37.0;
        let lhs = multiple_average(&sys, &fam, &fs, (a as f64, a as f64 + len), cfg, Exec::Serial).unwrap();
        let rhs = multiple_average(&sys, &fam, &moved, (0.0, len), cfg, Exec::Serial).unwrap();
        prop_assert!(lhs.value.dist(&rhs.value) < 1e-7, "{}", lhs.value.dist(&rhs.value));
    }
}
