use fpet_cli::config::{parse_config, Command, ExperimentSpec};
use proptest::prelude::*;
use std::path::PathBuf;

const COMMANDS: [Command; 6] = [
    Command::RunConvergence,
    Command::CheckInvariance,
    Command::CheckCharacteristic,
    Command::CheckVdc,
    Command::EnumeratePrecedents,
    Command::VerifyTimechange,
];

fn spec() -> impl Strategy<Value = ExperimentSpec> {
    (
        0usize..6,
        prop::option::of("[a-z]{1,8}"),
        1u64..40,
        1e-12f64..1.0,
        1u64..u32::MAX as u64,
        any::<u64>(),
        prop::sample::select(vec!["pinned", "sliding-k1", "sliding-k5", "irregular"]),
        prop::collection::vec(0.05f64..8.0, 1..6),
        prop::collection::vec((-9i64..=9, 1i64..=9), 1..4),
    )
        .prop_map(
            |(c, name, n_max, tol, budget, seed, intervals, alphas, phase)| {
                let mut s = ExperimentSpec::new(COMMANDS[c]);
                s.name = name;
                s.system = Some(PathBuf::from("sys.toml"));
                s.family = Some(PathBuf::from("fam.toml"));
                s.observables = vec![PathBuf::from("f1.toml"), PathBuf::from("f2.toml")];
                s.intervals = intervals.to_string();
                s.n_max = n_max;
                s.tol = tol;
                s.budget = budget;
                s.seed = seed;
                s.phase = phase.iter().map(|(p, q)| format!("{p}/{q}")).collect();
                s.indices = (1..=alphas.len() as u64).collect();
                s.alphas = alphas;
                s
            },
        )
}

proptest! {
    #[test]
    fn serialized_specs_parse_back_equal(s in spec()) {
        let text = s.to_toml();
        let back = parse_config(&text, "round-trip.toml").unwrap();
        prop_assert_eq!(back, s);
    }
}
