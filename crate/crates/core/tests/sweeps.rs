use dimer_core::entanglement::{concurrence_series, DEFAULT_EPS};
use dimer_core::model::psi_alpha;
use dimer_core::propagation::evolve;
use dimer_core::scenarios::{
    preset, preset_names, run_sweep, sweep_row, AxisParam, ScenarioPreset,
};
use dimer_core::Error;
use proptest::prelude::*;

fn short(name: &str, samples: usize) -> ScenarioPreset {
    let mut p = preset(name).unwrap();
    p.samples = samples;
    p.horizon_lifetimes = 3.0;
    p
}

#[test]
fn registry_covers_required_names() {
    let names = preset_names();
    for required in [
        "fig1a",
        "fig1b",
        "fig1cd",
        "fig2a",
        "fig2b",
        "fig2c",
        "fig2d",
        "fig3a",
        "fig3b",
        "fig3c",
        "fig3d",
        "fig4-vacuum",
        "fig5a",
        "fig5b",
        "fig5c",
        "fig6a",
        "fig6b",
        "fig6c",
        "fig7a",
        "fig7b",
        "fig8a",
        "fig8b",
        "fig-collapse-revival",
        "fig-interplay",
    ] {
        assert!(names.contains(&required), "{required} missing");
    }
    match preset("nonexistent") {
        Err(Error::UnknownPreset { available, .. }) => {
            assert!(available.contains(&"fig2a".to_string()))
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_point_sweep_equals_direct_run() {
    let p = short("fig2b", 80);
    let grid = run_sweep(&p, AxisParam::Alpha, &[0.3], 1e-9, DEFAULT_EPS).unwrap();
    let params = p.params;
    params.validate().unwrap();
    let traj = evolve(
        &psi_alpha(0.3, 0.0).unwrap(),
        &params,
        &p.times().unwrap(),
        1e-9,
    )
    .unwrap();
    let direct = concurrence_series(&traj).unwrap();
    assert_eq!(grid.values[0], direct.values);
    assert_eq!(grid.times, direct.times);
}

#[test]
fn relabeling_qubits_mirrors_the_alpha_axis() {
    let p = short("fig2b", 60);
    let mut mirrored = p.clone();
    mirrored.params.ell1 = p.params.ell2;
    mirrored.params.ell2 = p.params.ell1;
    mirrored.params.delta_minus = -p.params.delta_minus;
    let alphas = [0.0, 0.2, 0.5, 0.7, 1.0];
    let flipped: Vec<f64> = alphas.iter().map(|a| 1.0 - a).collect();
    let a = run_sweep(&p, AxisParam::Alpha, &alphas, 1e-10, DEFAULT_EPS).unwrap();
    let b = run_sweep(&mirrored, AxisParam::Alpha, &flipped, 1e-10, DEFAULT_EPS).unwrap();
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn grid_values_stay_in_unit_interval() {
    for name in ["fig5a", "fig6b", "fig7a", "fig8b"] {
        let p = short(name, 40);
        let axis = p.axis.unwrap();
        let values = [axis.start, 0.5 * (axis.start + axis.stop), axis.stop];
        let g = run_sweep(&p, axis.param, &values, 1e-9, DEFAULT_EPS).unwrap();
        assert_eq!(g.values.len(), 3);
        for row in &g.values {
            assert_eq!(row.len(), g.times.len());
            assert!(row.iter().all(|c| (0.0..=1.0).contains(c)));
        }
    }
}

#[test]
fn axis_must_match_the_family() {
    let p = short("fig2a", 10);
    let err = run_sweep(&p, AxisParam::A, &[0.2], 1e-9, DEFAULT_EPS).unwrap_err();
    assert!(matches!(err, Error::SweepPoint { .. }), "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rows_do_not_depend_on_evaluation_order(
        values in prop::collection::vec(0.0f64..=1.0, 2..6),
        seed in any::<u64>(),
    ) {
        let p = short("fig5b", 40);
        let grid = run_sweep(&p, AxisParam::Gamma, &values, 1e-9, DEFAULT_EPS).unwrap();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.rotate_left((seed % values.len() as u64) as usize);
        order.reverse();
        let permuted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let other = run_sweep(&p, AxisParam::Gamma, &permuted, 1e-9, DEFAULT_EPS).unwrap();
        for (k, &i) in order.iter().enumerate() {
            prop_assert_eq!(&other.values[k], &grid.values[i]);
            prop_assert_eq!(&other.events[k], &grid.events[i]);
        }
    }

    #[test]
    fn grid_equals_pointwise_recomputation(values in prop::collection::vec(0.0f64..=1.0, 1..4)) {
        let p = short("fig2c", 40);
        let grid = run_sweep(&p, AxisParam::Alpha, &values, 1e-9, DEFAULT_EPS).unwrap();
        for (row, &a) in grid.values.iter().zip(&values) {
            let (_, series) = sweep_row(&p, Some((AxisParam::Alpha, a)), &grid.times, 1e-9).unwrap();
            for (x, y) in row.iter().zip(&series.values) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
