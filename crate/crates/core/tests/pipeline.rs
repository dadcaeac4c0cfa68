use laxlab_core::export::{write_grid_function, write_roundoff};
use laxlab_core::{
    convergence_experiment, ftcs_heat, operator_norm, roundoff_growth_experiment, stability_check,
    von_neumann_check, ConvergenceOptions, FunctionDescriptor, HeatSemigroup, PrecisionSpec, RefinementPath,
    SchemeKind, DEFAULT_DOMAIN_LENGTH,
};
use proptest::prelude::*;

#[test]
fn backward_euler_converges_where_ftcs_blows_up() {
    let n0 = 32;
    let u = FunctionDescriptor::Sine(2).sample(n0, DEFAULT_DOMAIN_LENGTH).unwrap();
    let sg = HeatSemigroup::new(0.5, n0).unwrap();
    let path = RefinementPath::fixed_ratio(2.0).unwrap();
    let dts: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&n| 2.0 * (DEFAULT_DOMAIN_LENGTH / n as f64).powi(2))
        .collect();
    let options = ConvergenceOptions {
        tolerance: 1e-2,
        ..ConvergenceOptions::default()
    };
    let be = convergence_experiment(SchemeKind::BackwardEuler, &path, &sg, &u, 0.5, &dts, &options).unwrap();
    assert!(be.converged, "{:?}", be.errors());
    let q = be.observed_order.unwrap();
    assert!((1.7..2.3).contains(&q), "order in dx {q}");
    let ftcs = convergence_experiment(SchemeKind::Ftcs, &path, &sg, &u, 0.5, &dts, &options).unwrap();
    assert!(!ftcs.converged);
    assert!(ftcs.rows.iter().all(|r| r.bound_l > 10.0));
}

#[test]
fn roundoff_table_round_trips_through_csv() {
    let n = 16;
    let dx = DEFAULT_DOMAIN_LENGTH / n as f64;
    let s = ftcs_heat(0.4 * dx * dx, dx).unwrap();
    let u = FunctionDescriptor::Sine(1).sample(n, DEFAULT_DOMAIN_LENGTH).unwrap();
    let report = roundoff_growth_experiment(&s, &u, 0.2, &PrecisionSpec::new(10).unwrap()).unwrap();
    let mut buf = Vec::new();
    write_roundoff(&mut buf, [&report]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), report.samples.len() + 1);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[2].parse::<f64>().unwrap(), report.final_gap());
    assert_eq!(last[3], "10");

    let mut buf = Vec::new();
    write_grid_function(&mut buf, &u).unwrap();
    let values: Vec<f64> = String::from_utf8(buf)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, u.values());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn von_neumann_never_exceeds_operator_norm(r in 0.01f64..1.5, n in 8usize..96) {
        let dx = DEFAULT_DOMAIN_LENGTH / n as f64;
        let s = ftcs_heat(r * dx * dx, dx).unwrap();
        let g = von_neumann_check(&s, n).unwrap().max_abs_g;
        prop_assert!(g <= operator_norm(&s) + 1e-12);
    }

    #[test]
    fn stable_ratios_keep_powers_bounded(r in 0.01f64..=0.5, n in 8usize..64) {
        let dx = DEFAULT_DOMAIN_LENGTH / n as f64;
        let s = ftcs_heat(r * dx * dx, dx).unwrap();
        let report = stability_check(&s, 1.0).unwrap();
        prop_assert!(report.stable);
        prop_assert!(report.bound_l <= 1.0 + 1e-12);
    }
}
