use std::sync::OnceLock;

use super::{
    AxisParam, AxisSpec, InitialState, ScenarioPreset, SpectrumSpec, DEFAULT_AXIS_POINTS,
    DEFAULT_SAMPLES,
};
use crate::error::{Error, Result};
use crate::model::QuotedParams;

const DECAY: f64 = 10.0;
const STATIONARY: f64 = 50.0;

/// The coupled pair of the reference experiment: Γ = 2π×50 MHz,
/// Γ12 = 2π×9 MHz, V12 = 950 MHz, Δ− = 2320 MHz, Δe = −160 MHz.
fn coupled(ell1: f64, ell2: f64, delta_plus: f64) -> QuotedParams {
    QuotedParams {
        gamma1_mhz_over_2pi: 50.0,
        gamma2_mhz_over_2pi: 50.0,
        gamma12_mhz_over_2pi: 9.0,
        v12_mhz: 950.0,
        delta_minus_mhz: 2320.0,
        delta_plus_mhz: delta_plus,
        delta_e_mhz: -160.0,
        ell1_mhz: ell1,
        ell2_mhz: ell2,
    }
}

/// Independent emitters (V12 = Γ12 = 0) with rate 2π×`gamma` MHz.
fn uncoupled(gamma: f64, ell: f64, delta_plus: f64) -> QuotedParams {
    QuotedParams {
        gamma1_mhz_over_2pi: gamma,
        gamma2_mhz_over_2pi: gamma,
        gamma12_mhz_over_2pi: 0.0,
        v12_mhz: 0.0,
        delta_minus_mhz: 2320.0,
        delta_plus_mhz: delta_plus,
        delta_e_mhz: -160.0,
        ell1_mhz: ell,
        ell2_mhz: ell,
    }
}

fn unit_axis(param: AxisParam) -> Option<AxisSpec> {
    Some(AxisSpec {
        param,
        start: 0.0,
        stop: 1.0,
        points: DEFAULT_AXIS_POINTS,
    })
}

fn ell_axis(stop: f64) -> Option<AxisSpec> {
    Some(AxisSpec {
        param: AxisParam::EllMhz,
        start: 0.0,
        stop,
        points: DEFAULT_AXIS_POINTS,
    })
}

const SPECTRUM: Option<SpectrumSpec> = Some(SpectrumSpec {
    start_mhz: -2500.0,
    stop_mhz: 2500.0,
    step_mhz: 5.0,
});

struct Entry {
    name: &'static str,
    summary: &'static str,
    quoted: QuotedParams,
    initial: InitialState,
    axis: Option<AxisSpec>,
    horizon_lifetimes: f64,
    spectrum: Option<SpectrumSpec>,
}

fn spectrum_entry(name: &'static str, summary: &'static str, quoted: QuotedParams) -> Entry {
    Entry {
        name,
        summary,
        quoted,
        initial: InitialState::Product {
            gamma: 1.0,
            zeta: 1.0,
        },
        axis: None,
        horizon_lifetimes: STATIONARY,
        spectrum: SPECTRUM,
    }
}

fn entries() -> Vec<Entry> {
    let psi = InitialState::PsiAlpha {
        alpha: 0.5,
        phi: 0.0,
    };
    let esb = InitialState::ExcitedProduct { alpha: 0.0 };
    let product = |zeta| InitialState::Product { gamma: 0.5, zeta };
    let d = 2320.0;

    let mut v = vec![
        spectrum_entry(
            "fig1a",
            "steady-state spectrum of the coupled pair, strong dipolar coupling",
            coupled(200.0, 200.0, 0.0),
        ),
        spectrum_entry(
            "fig1a-v50",
            "as fig1a with V12 = 50 MHz",
            QuotedParams {
                v12_mhz: 50.0,
                ..coupled(200.0, 200.0, 0.0)
            },
        ),
        spectrum_entry(
            "fig1b",
            "as fig1a with degenerate transitions (Δ− = 0)",
            QuotedParams {
                delta_minus_mhz: 0.0,
                ..coupled(200.0, 200.0, 0.0)
            },
        ),
        spectrum_entry(
            "fig1cd",
            "fluorescence spectrum with Γ = 2π×9 MHz, Γ12 = 2π×4.5 MHz, ℓ = 100 MHz",
            QuotedParams {
                gamma1_mhz_over_2pi: 9.0,
                gamma2_mhz_over_2pi: 9.0,
                gamma12_mhz_over_2pi: 4.5,
                ..coupled(100.0, 100.0, 0.0)
            },
        ),
    ];

    let no_shift = |q: QuotedParams| QuotedParams {
        delta_e_mhz: 0.0,
        ..q
    };
    for (name, summary, q) in [
        (
            "fig2a",
            "strong symmetric driving, Δ+ = 0: early-stage disentanglement for every α",
            no_shift(coupled(500.0, 500.0, 0.0)),
        ),
        (
            "fig2b",
            "asymmetric driving ℓ1 = 300, ℓ2 = 500 MHz, Δ+ = 0",
            no_shift(coupled(300.0, 500.0, 0.0)),
        ),
        (
            "fig2c",
            "asymmetric driving with Δ+ = Δ−",
            no_shift(coupled(300.0, 500.0, d)),
        ),
        (
            "fig2d",
            "asymmetric driving with Δ+ = −Δ−",
            no_shift(coupled(300.0, 500.0, -d)),
        ),
    ] {
        v.push(Entry {
            name,
            summary,
            quoted: q,
            initial: psi,
            axis: unit_axis(AxisParam::Alpha),
            horizon_lifetimes: DECAY,
            spectrum: None,
        });
    }

    for (name, summary, q) in [
        (
            "fig3a",
            "sudden birth from |1⟩(√α|0⟩+√β|1⟩), Δ+ = Δ−, ℓ = 100 MHz",
            coupled(100.0, 100.0, d),
        ),
        (
            "fig3b",
            "sudden birth, Δ+ = Δ−, ℓ1 = 300, ℓ2 = 500 MHz",
            coupled(300.0, 500.0, d),
        ),
        (
            "fig3c",
            "sudden birth, Δ+ = −Δ−, ℓ = 100 MHz",
            coupled(100.0, 100.0, -d),
        ),
        (
            "fig3d",
            "sudden birth, Δ+ = −Δ−, ℓ1 = 300, ℓ2 = 500 MHz: stationary entanglement",
            coupled(300.0, 500.0, -d),
        ),
    ] {
        v.push(Entry {
            name,
            summary,
            quoted: q,
            initial: esb,
            axis: unit_axis(AxisParam::Alpha),
            horizon_lifetimes: STATIONARY,
            spectrum: None,
        });
    }

    v.push(Entry {
        name: "fig4-vacuum",
        summary: "X-state family a under pure spontaneous emission; Δ+ set to 0 (it only rotates a coherence that is zero here)",
        quoted: QuotedParams {
            gamma1_mhz_over_2pi: 50.0,
            gamma2_mhz_over_2pi: 50.0,
            delta_minus_mhz: d,
            ..QuotedParams::default()
        },
        initial: InitialState::FamilyA { a: 0.0 },
        axis: unit_axis(AxisParam::A),
        horizon_lifetimes: DECAY,
        spectrum: None,
    });

    for (name, zeta) in [("fig5a", 0.0), ("fig5b", 0.5), ("fig5c", 1.0)] {
        v.push(Entry {
            name,
            summary: "product states Ψ0(γ) with coupling, Δ+ = 0, ℓ = 100 MHz",
            quoted: coupled(100.0, 100.0, 0.0),
            initial: product(zeta),
            axis: unit_axis(AxisParam::Gamma),
            horizon_lifetimes: STATIONARY,
            spectrum: None,
        });
    }

    for (name, zeta) in [("fig6a", 0.0), ("fig6b", 0.5), ("fig6c", 1.0)] {
        v.push(Entry {
            name,
            summary:
                "product states Ψ0(γ) without coupling, Γ = 2π×5 MHz, Δ+ = 2638 MHz, ℓ = 200 MHz",
            quoted: uncoupled(5.0, 200.0, 2638.0),
            initial: product(zeta),
            axis: unit_axis(AxisParam::Gamma),
            horizon_lifetimes: DECAY,
            spectrum: None,
        });
    }

    for (name, v12) in [("fig7a", 950.0), ("fig7b", 50.0)] {
        v.push(Entry {
            name,
            summary: "laser-strength scan from γ = ζ = 1/2, Δ+ = 0",
            quoted: QuotedParams {
                v12_mhz: v12,
                ..coupled(100.0, 100.0, 0.0)
            },
            initial: product(0.5),
            axis: ell_axis(1000.0),
            horizon_lifetimes: STATIONARY,
            spectrum: None,
        });
    }

    v.push(Entry {
        name: "fig8a",
        summary: "uncoupled pair from ψ0(α), ℓ = 200 MHz, Γ = 2π×5 MHz",
        quoted: uncoupled(5.0, 200.0, 2638.0),
        initial: psi,
        axis: unit_axis(AxisParam::Alpha),
        horizon_lifetimes: DECAY,
        spectrum: None,
    });
    v.push(Entry {
        name: "fig8b",
        summary: "uncoupled pair from ψ0(1/2), laser-strength scan, Γ = 2π×5 MHz",
        quoted: uncoupled(5.0, 200.0, 2638.0),
        initial: psi,
        axis: ell_axis(1000.0),
        horizon_lifetimes: DECAY,
        spectrum: None,
    });
    v.push(Entry {
        name: "fig-collapse-revival",
        summary: "uncoupled pair from ψ0(α) with Γ = 4π MHz: dark periods and revivals",
        quoted: uncoupled(2.0, 200.0, 2638.0),
        initial: psi,
        axis: unit_axis(AxisParam::Alpha),
        horizon_lifetimes: DECAY,
        spectrum: None,
    });
    v.push(Entry {
        name: "fig-interplay",
        summary: "ψ0(1/2) with Γ = 4π MHz: laser strength against the |11⟩ shift",
        quoted: uncoupled(2.0, 200.0, 2638.0),
        initial: psi,
        axis: ell_axis(400.0),
        horizon_lifetimes: DECAY,
        spectrum: None,
    });
    v.push(Entry {
        name: "fig-interplay-inset",
        summary: "undriven √α|00⟩+√β|11⟩ with Γ = 4π MHz, Δ+ = 20000 MHz: closed-form death times",
        quoted: uncoupled(2.0, 0.0, 20000.0),
        initial: InitialState::PsiZeroOne {
            alpha: 0.25,
            phi: 0.0,
        },
        axis: unit_axis(AxisParam::Alpha),
        horizon_lifetimes: DECAY,
        spectrum: None,
    });
    v
}

/// Every registered preset, in registry order.
pub fn presets() -> &'static [ScenarioPreset] {
    static REGISTRY: OnceLock<Vec<ScenarioPreset>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        entries()
            .into_iter()
            .map(|e| ScenarioPreset {
                name: e.name,
                summary: e.summary,
                quoted: e.quoted,
                params: e.quoted.to_params().expect("registered presets are valid"),
                initial: e.initial,
                axis: e.axis,
                horizon_lifetimes: e.horizon_lifetimes,
                samples: DEFAULT_SAMPLES,
                spectrum: e.spectrum,
            })
            .collect()
    })
}

pub fn preset_names() -> Vec<&'static str> {
    presets().iter().map(|p| p.name).collect()
}

pub fn preset(name: &str) -> Result<ScenarioPreset> {
    presets()
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            available: preset_names().into_iter().map(String::from).collect(),
        })
}
