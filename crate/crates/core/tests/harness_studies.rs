use csrk::exact::{int, rat};
use csrk::harness::{
    builtin_problems, efficiency_study, energy_drift, fit_slope, henon_heiles, kepler, make_nonsymmetric_control,
    measure_order, measure_parallel_speedup, output_filename, pendulum, problem_by_name, spring_chain, study_config,
    HarnessError, MethodSpec, PROBLEM_NAMES,
};
use csrk::SolverConfig;
use proptest::prelude::*;

proptest! {
    #[test]
    fn slope_recovers_power_law(p in 0.5f64..8.0, c in 1e-6f64..1e3) {
        let h: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
        let e: Vec<f64> = h.iter().map(|x| c * x.powf(p)).collect();
        prop_assert!((fit_slope(&h, &e) - p).abs() < 1e-9);
    }
}

#[test]
fn symmetric_methods_conserve_energy_on_builtins() {
    let methods = [
        MethodSpec::Avf,
        MethodSpec::AvfCollocation { s: 2 },
        MethodSpec::AvfCollocation { s: 3 },
        MethodSpec::Parallel4 { theta: int(1) },
        MethodSpec::Bnonconst4,
    ];
    for prob in builtin_problems() {
        for m in &methods {
            let t = m.build().unwrap();
            let cfg = study_config(&t, &prob, 1e-13);
            let drift = energy_drift(&t, &prob, prob.reference_h, 2000, &cfg).unwrap();
            assert!(drift <= 1e-9, "{} {}: {drift:e}", prob.name, m.slug());
        }
    }
}

#[test]
fn control_tableau_drifts_on_pendulum() {
    let t = make_nonsymmetric_control();
    let prob = pendulum();
    let drift = energy_drift(&t, &prob, prob.reference_h, 2000, &SolverConfig::for_tableau(&t)).unwrap();
    assert!(drift > 1e-6, "{drift:e}");
}

#[test]
fn kepler_orders() {
    let prob = kepler();
    let h = [0.1, 0.05, 0.025, 0.0125];
    for (m, p) in [(MethodSpec::Avf, 2.0), (MethodSpec::AvfCollocation { s: 2 }, 4.0)] {
        let t = m.build().unwrap();
        let cfg = study_config(&t, &prob, 1e-14);
        let r = measure_order(&t, &prob, &h, &cfg).unwrap();
        assert!((r.slope - p).abs() <= 0.15, "{} slope {}", m.slug(), r.slope);
    }
}

#[test]
fn round_off_floor_is_reported() {
    let prob = pendulum();
    let t = MethodSpec::AvfCollocation { s: 3 }.build().unwrap();
    let cfg = study_config(&t, &prob, 1e-15);
    let h = [1e-3, 5e-4, 2.5e-4, 1.25e-4];
    let short = csrk::harness::BenchmarkProblem { t_end: 0.01, ..prob };
    assert!(matches!(measure_order(&t, &short, &h, &cfg), Err(HarnessError::DegenerateFit { .. })));
    assert!(matches!(measure_order(&t, &short, &h[..3], &cfg), Err(HarnessError::InvalidInput(_))));
}

#[test]
fn efficiency_ratio_tracks_model() {
    let prob = henon_heiles();
    for theta in [rat(1, 2), int(1), int(3)] {
        let r = efficiency_study(&theta, &prob, 0.05).unwrap();
        assert!(r.ratio > 0.0 && r.predicted_ratio > 0.0);
        assert!((r.ratio / r.predicted_ratio - 1.0).abs() < 0.1, "theta {theta}: {r:?}");
    }
}

#[test]
fn speedup_rows_are_identical() {
    let t = MethodSpec::AvfCollocation { s: 3 }.build().unwrap();
    let prob = spring_chain(20);
    let rows = measure_parallel_speedup(&t, &prob, 0.05, 20, &[1, 3]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.identical && r.wall_time_ms > 0.0));
    assert!(measure_parallel_speedup(&t, &prob, 0.05, 1, &[]).is_err());
}

#[test]
fn registry_lookup() {
    for name in PROBLEM_NAMES {
        assert_eq!(problem_by_name(name).unwrap().name, name);
    }
    assert!(matches!(problem_by_name("nope"), Err(HarnessError::UnknownProblem(_))));
    assert_eq!(output_filename("kepler", "avf", 0.05), "kepler_avf_0.05.csv");
}
