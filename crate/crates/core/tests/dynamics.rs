mod support;

use dimer_core::generator::{build_liouvillian, generator_action};
use dimer_core::model::{psi_zero_one, DensityMatrix, DimerParams};
use dimer_core::propagation::{
    analytic_zero_one_state, evolve, propagate_expm, uniform_times, DEFAULT_TOL,
};
use dimer_core::scenarios::{configure, presets};
use dimer_core::units::{to_angular, Quoted};
use rand::Rng;
use support::*;

fn mhz(x: f64) -> f64 {
    to_angular(x, Quoted::Frequency).unwrap()
}

#[test]
fn drift_bounds_hold_on_every_preset() {
    for p in presets() {
        let (params, rho0) = configure(p, None).unwrap();
        let g = params.reference_rate().unwrap();
        let times = uniform_times(10.0 / g, 200).unwrap();
        let d = evolve(&rho0, &params, &times, DEFAULT_TOL)
            .unwrap()
            .drift()
            .unwrap();
        assert!(d.trace <= 1e-9, "{}: {d:?}", p.name);
        assert!(d.hermiticity <= 1e-10, "{}: {d:?}", p.name);
        assert!(d.min_eigenvalue >= -1e-8, "{}: {d:?}", p.name);
    }
}

#[test]
fn drift_bounds_hold_from_random_mixed_states() {
    let mut r = rng(3);
    for p in presets().iter().step_by(3) {
        let params = p.params;
        let g = params.reference_rate().unwrap();
        let rho0 = random_state(&mut r, 4);
        let times = uniform_times(10.0 / g, 50).unwrap();
        let d = evolve(&rho0, &params, &times, DEFAULT_TOL)
            .unwrap()
            .drift()
            .unwrap();
        assert!(
            d.trace <= 1e-9 && d.hermiticity <= 1e-10 && d.min_eigenvalue >= -1e-8,
            "{}: {d:?}",
            p.name
        );
    }
}

#[test]
fn superoperator_matches_direct_action_on_every_preset() {
    let mut r = rng(5);
    for p in presets() {
        let l = build_liouvillian(&p.params).unwrap();
        let scale = l.norm_inf().max(1.0);
        for _ in 0..100 {
            let rank = r.random_range(1..=4);
            let rho = random_state(&mut r, rank);
            let direct = generator_action(rho.matrix(), &p.params).unwrap();
            let err = max_diff(&l.apply(rho.matrix()), &direct);
            assert!(
                err <= 1e-12 * scale,
                "{}: {err:e} (scale {scale:e})",
                p.name
            );
        }
    }
}

#[test]
fn evolve_agrees_with_expm_on_every_preset() {
    for p in presets() {
        let (params, rho0) = configure(p, None).unwrap();
        let g = params.reference_rate().unwrap();
        let times: Vec<f64> = [0.0, 0.1, 1.0, 5.0].iter().map(|x| x / g).collect();
        let tr = evolve(&rho0, &params, &times, DEFAULT_TOL).unwrap();
        for (k, &t) in times.iter().enumerate().skip(1) {
            let exact = propagate_expm(&rho0, &params, t).unwrap();
            let err = max_diff(tr.states[k].matrix(), exact.matrix());
            assert!(err <= 10.0 * DEFAULT_TOL, "{} at t={t:e}: {err:e}", p.name);
        }
    }
}

#[test]
fn analytic_solution_matches_integrator_for_strong_detuning() {
    let gamma = mhz(50.0);
    let p = DimerParams {
        gamma1: gamma,
        gamma2: gamma,
        delta_e: mhz(-160.0),
        delta_plus: mhz(20000.0),
        ..Default::default()
    };
    let times = uniform_times(5.0 / gamma, 400).unwrap();
    for alpha in [0.0, 0.25, 0.5, 0.75] {
        let tr = evolve(&psi_zero_one(alpha, 0.0).unwrap(), &p, &times, 1e-11).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let exact = analytic_zero_one_state(alpha, t, gamma, p.delta_e, p.delta_plus).unwrap();
            let err = max_diff(tr.states[k].matrix(), exact.matrix());
            assert!(err <= 1e-8, "alpha={alpha} t={t:e}: {err:e}");
        }
    }
}

#[test]
fn analytic_solution_populations_at_one_lifetime() {
    let g = 3.0;
    let rho = analytic_zero_one_state(0.0, 1.0 / g, g, 0.0, 0.0).unwrap();
    let e2 = (-2.0_f64).exp();
    assert!((rho.population(3) - e2).abs() < 1e-14);
    assert!((rho.population(1) - e2 * (1.0_f64.exp() - 1.0)).abs() < 1e-14);
    assert!((rho.population(2) - rho.population(1)).abs() < 1e-15);
    assert!((rho.trace().re - 1.0).abs() < 1e-14);
}

#[test]
fn ground_state_is_stationary_without_drive() {
    let p = DimerParams {
        gamma1: 2.0,
        gamma2: 3.0,
        gamma12: 1.0,
        v12: 40.0,
        delta_minus: 7.0,
        ..Default::default()
    };
    for t in [0.0, 0.3, 12.0] {
        let rho = propagate_expm(&DensityMatrix::ground(), &p, t).unwrap();
        assert!(max_diff(rho.matrix(), DensityMatrix::ground().matrix()) < 1e-14);
    }
}
