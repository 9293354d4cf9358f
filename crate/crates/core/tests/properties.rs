use permzne::noise::{factorial, sample_error_table};
use permzne::perturbation::{compute_profile, deviation_bounds, relative_deviation};
use permzne::qsim::run_noisy_circuit;
use permzne::*;
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_round_trips(pi in (2usize..10).prop_flat_map(permutation)) {
        let rank = pi.rank().unwrap();
        prop_assert!(rank < factorial(pi.len()));
        prop_assert_eq!(Permutation::from_rank(pi.len(), rank).unwrap(), pi);
    }

    #[test]
    fn trace_preserved_under_noise(
        theta in prop::collection::vec(-3.0f64..3.0, 3 * (2 * 4 + 4)),
        seed in 0u64..1000,
        q_max in 0.0f64..1.0,
        pi in permutation(4),
    ) {
        let circuit = build_hea(4, 3, Topology::Ring).unwrap();
        let model = sample_error_table(4, q_max, seed).unwrap();
        let rho = run_noisy_circuit(&circuit, &theta, &model, &pi).unwrap();
        prop_assert!(rho.cptp_report().is_valid());
    }

    #[test]
    fn first_order_deviation_within_bounds(
        theta in prop::collection::vec(-3.0f64..3.0, 2 * (2 * 4 + 3)),
        seed in 0u64..1000,
        pi in permutation(4),
    ) {
        let circuit = build_hea(4, 2, Topology::Line).unwrap();
        let h = build_tfim(4, &[1.0; 4], &[0.8; 4]).unwrap();
        let profile = compute_profile(&circuit, &theta, &h).unwrap();
        prop_assume!(profile.delta().abs() > 1e-6);
        let model = sample_error_table(4, 1e-2, seed).unwrap();
        let bounds = deviation_bounds(&profile, &model, &pi, &circuit).unwrap();
        let measured = relative_deviation(&profile, &circuit, &model, &pi).unwrap();
        prop_assert!(measured <= bounds.bound * (1.0 + 1e-9) + 1e-12, "{} > {:?}", measured, bounds);
    }
}
