use std::path::PathBuf;

use dimer_core::entanglement::{
    concurrence, concurrence_series, esd_time_alpha, esd_time_family_a,
};
use dimer_core::generator::build_liouvillian;
use dimer_core::linalg::{max_abs, vec4};
use dimer_core::model::DimerParams;
use dimer_core::propagation::{
    analytic_zero_one_state, evolve_with, uniform_times, Method, Trajectory,
};
use dimer_core::scenarios::{
    detect_row_events, preset, preset_names, presets, run_sweep_with, AxisParam, AxisSpec,
    InitialState, ScenarioPreset,
};
use dimer_core::stationary::{
    detuning_grid, find_peaks, fluorescence_signal, spectrum_scan, steady_state,
};
use dimer_core::units::{to_angular, Quoted};
use dimer_core::QuotedParams;
use serde::Serialize;

use crate::cli::{EvolveArgs, OracleArgs, OracleFamily, Source, SweepArgs};
use crate::config::{parse_config_with, RunConfig, Strictness, TimeSpan};
use crate::error::CliError;
use crate::output::{
    csv_records, csv_table, emit, json_bytes, num, sidecar_for, EventRecord, SCHEMA_VERSION,
};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub permissive: bool,
}

pub const SPECTRUM_HEADER: [&str; 5] = ["delta_plus_half_mhz", "signal", "p01", "p10", "p11"];
pub const EVOLVE_HEADER: [&str; 10] = [
    "time_us",
    "concurrence",
    "p00",
    "p01",
    "p10",
    "p11",
    "re_rho0011",
    "im_rho0011",
    "re_rho0110",
    "im_rho0110",
];
pub const SWEEP_HEADER: [&str; 3] = ["axis_value", "time_us", "concurrence"];

/// Reads the config named by `--config`, applies `--preset` and the global
/// overrides.
pub fn load(globals: &Globals, src: &Source) -> Result<RunConfig, CliError> {
    let text = match (&src.config, &src.preset) {
        (None, None) => {
            return Err(CliError::Usage(
                "give --config FILE or --preset NAME".into(),
            ))
        }
        (Some(path), name) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            match name {
                None => text,
                Some(name) => {
                    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| {
                        crate::config::ConfigError::Syntax(e.message().to_string())
                    })?;
                    doc.insert("preset".into(), toml::Value::String(name.clone()));
                    toml::to_string(&doc).expect("a parsed table serializes")
                }
            }
        }
        (None, Some(name)) => {
            let mut doc = toml::Table::new();
            doc.insert("preset".into(), toml::Value::String(name.clone()));
            toml::to_string(&doc).expect("a plain table serializes")
        }
    };
    let strictness = if globals.permissive {
        Strictness::Permissive
    } else {
        Strictness::Strict
    };
    let parsed = parse_config_with(&text, strictness)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let mut c = parsed.config;
    if let Some(tol) = globals.tol {
        c.solver.tol = tol;
    }
    if let Some(out) = &globals.output {
        c.output.csv = Some(out.clone());
    }
    Ok(c)
}

/// Peak listing goes to standard output unless the CSV itself does.
fn report(to_stdout: bool, text: &str) {
    if to_stdout {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

pub fn spectrum(globals: &Globals, src: &Source) -> Result<(), CliError> {
    let c = load(globals, src)?;
    let params = c.params()?;
    let d = c.grid.detuning.ok_or_else(|| {
        CliError::Usage(
            "spectrum needs grid.detuning_start_mhz/stop/step or a spectrum preset".into(),
        )
    })?;
    let grid = detuning_grid(d.start_mhz, d.stop_mhz, d.step_mhz)?;
    let curve = spectrum_scan(&params, &grid)?;
    let rows = (0..curve.len()).map(|i| {
        vec![
            curve.detuning_axis[i],
            curve.signal[i],
            curve.p01[i],
            curve.p10[i],
            curve.p11[i],
        ]
    });
    emit(c.output.csv.as_deref(), &csv_table(&SPECTRUM_HEADER, rows)?)?;

    let peaks = find_peaks(&curve);
    let mut text = format!("{} peaks\n", peaks.len());
    for p in &peaks {
        text += &format!(
            "  delta_plus_half_mhz={} height={}\n",
            num(p.location_mhz),
            num(p.height)
        );
    }
    report(c.output.csv.is_some(), &text);
    Ok(())
}

#[derive(Debug, Serialize)]
struct SolverRecord {
    method: &'static str,
    tol: Option<f64>,
    rk4_step_us: Option<f64>,
    eps: f64,
}

impl SolverRecord {
    fn new(method: Method, eps: f64) -> Self {
        let (tol, rk4_step_us) = match method {
            Method::Dopri45 { tol } => (Some(tol), None),
            Method::Rk4 { step } => (None, Some(step)),
            Method::Expm => (None, None),
        };
        Self {
            method: method.name(),
            tol,
            rk4_step_us,
            eps,
        }
    }
}

#[derive(Debug, Serialize)]
struct Events {
    death: Option<EventRecord>,
    birth: Option<EventRecord>,
}

/// Closed-form reference for an undriven pair without dipolar coupling.
#[derive(Debug, Serialize)]
struct OracleRecord {
    formula: &'static str,
    /// None when the formula predicts asymptotic decay only.
    closed_form_death_us: Option<f64>,
    /// Largest elementwise |ρ_numeric − ρ_closed_form| over all samples.
    max_abs_deviation: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EvolveSidecar {
    schema_version: u32,
    command: &'static str,
    preset: Option<String>,
    system: QuotedParams,
    initial_state: InitialState,
    solver: SolverRecord,
    accepted_steps: u64,
    rejected_steps: u64,
    samples: usize,
    t_stop_us: f64,
    events: Events,
    oracle: Option<OracleRecord>,
}

/// V12 = Γ12 = ℓ = 0 and Γ1 = Γ2: the regime of the closed-form solutions.
fn closed_form_regime(p: &DimerParams) -> bool {
    p.is_undriven() && p.v12 == 0.0 && p.gamma12 == 0.0 && p.gamma1 == p.gamma2 && p.gamma1 > 0.0
}

fn oracle_for(
    p: &DimerParams,
    init: &InitialState,
    traj: Option<&Trajectory>,
) -> Result<Option<OracleRecord>, CliError> {
    if !closed_form_regime(p) {
        return Ok(None);
    }
    Ok(match *init {
        InitialState::PsiZeroOne { alpha, phi } => {
            let deviation = match traj {
                Some(tr) if phi == 0.0 => {
                    let mut worst = 0.0_f64;
                    for (t, rho) in tr.times.iter().zip(&tr.states) {
                        let exact =
                            analytic_zero_one_state(alpha, *t, p.gamma1, p.delta_e, p.delta_plus)?;
                        worst = worst.max(max_abs(&(rho.matrix() - exact.matrix())));
                    }
                    Some(worst)
                }
                _ => None,
            };
            Some(OracleRecord {
                formula: "alpha",
                closed_form_death_us: esd_time_alpha(alpha, p.gamma1)?,
                max_abs_deviation: deviation,
            })
        }
        InitialState::FamilyA { a } => Some(OracleRecord {
            formula: "family-a",
            closed_form_death_us: esd_time_family_a(a, p.gamma1)?,
            max_abs_deviation: None,
        }),
        _ => None,
    })
}

fn json_target(explicit: &Option<PathBuf>, c: &RunConfig) -> Option<PathBuf> {
    explicit
        .clone()
        .or_else(|| c.output.json.clone())
        .or_else(|| c.output.csv.as_deref().map(sidecar_for))
}

pub fn evolve(globals: &Globals, args: &EvolveArgs) -> Result<(), CliError> {
    let c = load(globals, &args.source)?;
    let params = c.params()?;
    let init = c.initial_state.ok_or_else(|| {
        CliError::Usage("evolve needs an [initial_state] section or a preset that has one".into())
    })?;
    let grid = c.grid.time.ok_or_else(|| {
        CliError::Usage("evolve needs grid.t_stop_us or grid.t_stop_lifetimes".into())
    })?;
    if grid.samples == 0 {
        return Err(CliError::Usage("grid.samples must be at least 1".into()));
    }
    let t_stop = grid.t_stop_us(&params)?;
    let times = uniform_times(t_stop, grid.samples)?;
    let method = c.solver.method()?;
    let rho0 = init.build()?;
    let traj = evolve_with(&rho0, &params, &times, method)?;
    let series = concurrence_series(&traj)?;
    let events = detect_row_events(&series, &traj, &params, c.solver.eps)?;

    let rows = traj
        .times
        .iter()
        .zip(&traj.states)
        .zip(&series.values)
        .map(|((t, rho), conc)| {
            let z = rho.element(0, 3);
            let w = rho.element(1, 2);
            vec![
                *t,
                *conc,
                rho.population(0),
                rho.population(1),
                rho.population(2),
                rho.population(3),
                z.re,
                z.im,
                w.re,
                w.im,
            ]
        });
    emit(c.output.csv.as_deref(), &csv_table(&EVOLVE_HEADER, rows)?)?;

    if let Some(path) = json_target(&args.sidecar, &c) {
        let sidecar = EvolveSidecar {
            schema_version: SCHEMA_VERSION,
            command: "evolve",
            preset: c.preset.clone(),
            system: c.system,
            initial_state: init,
            solver: SolverRecord::new(method, c.solver.eps),
            accepted_steps: traj.meta.accepted_steps,
            rejected_steps: traj.meta.rejected_steps,
            samples: times.len(),
            t_stop_us: t_stop,
            events: Events {
                death: events.death.as_ref().map(EventRecord::from),
                birth: events.birth.as_ref().map(EventRecord::from),
            },
            oracle: oracle_for(&params, &init, Some(&traj))?,
        };
        emit(Some(&path), &json_bytes(&sidecar))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RowRecord {
    axis_value: f64,
    death: Option<EventRecord>,
    birth: Option<EventRecord>,
    /// Present when a closed form applies to the row.
    closed_form_death_us: Option<Option<f64>>,
    /// |numeric − closed form| / closed form, when both exist.
    relative_error: Option<f64>,
}

#[derive(Debug, Serialize)]
struct OracleComparison {
    formula: &'static str,
    rows_compared: usize,
    max_relative_error: f64,
    /// Axis values where one side predicts a death and the other does not.
    mismatched_rows: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    schema_version: u32,
    command: &'static str,
    preset: Option<String>,
    system: QuotedParams,
    initial_state: InitialState,
    axis: &'static str,
    points: usize,
    samples: usize,
    t_stop_us: f64,
    solver: SolverRecord,
    rows: Vec<RowRecord>,
    oracle_comparison: Option<OracleComparison>,
}

fn sweep_axis(c: &RunConfig, args: &SweepArgs) -> Result<AxisSpec, CliError> {
    let base = c.grid.axis;
    let param = match &args.axis {
        Some(name) => AxisParam::parse(name)?,
        None => base
            .map(|a| a.param)
            .ok_or_else(|| CliError::Usage("sweep needs --axis or a grid.axis key".into()))?,
    };
    let inherit = base.filter(|a| a.param == param);
    let need = |flag: Option<f64>, from: Option<f64>, what: &str| {
        flag.or(from)
            .ok_or_else(|| CliError::Usage(format!("sweep over `{}` needs --{what}", param.name())))
    };
    Ok(AxisSpec {
        param,
        start: need(args.start, inherit.map(|a| a.start), "start")?,
        stop: need(args.stop, inherit.map(|a| a.stop), "stop")?,
        points: args
            .points
            .or(inherit.map(|a| a.points))
            .unwrap_or(dimer_core::scenarios::DEFAULT_AXIS_POINTS),
    })
}

fn scenario(c: &RunConfig, axis: AxisSpec) -> Result<ScenarioPreset, CliError> {
    let params = c.params()?;
    let initial = c.initial_state.ok_or_else(|| {
        CliError::Usage("sweep needs an [initial_state] section or a preset that has one".into())
    })?;
    let grid = c.grid.time.ok_or_else(|| {
        CliError::Usage("sweep needs grid.t_stop_us or grid.t_stop_lifetimes".into())
    })?;
    let horizon_lifetimes = match grid.span {
        TimeSpan::Lifetimes(n) => n,
        TimeSpan::Us(t) => t * params.reference_rate()?,
    };
    let (name, summary) = match &c.preset {
        Some(n) => {
            let p = preset(n)?;
            (p.name, p.summary)
        }
        None => ("custom", "parameters from a run configuration"),
    };
    Ok(ScenarioPreset {
        name,
        summary,
        quoted: c.system,
        params,
        initial,
        axis: Some(axis),
        horizon_lifetimes,
        samples: grid.samples,
        spectrum: None,
    })
}

pub fn sweep(globals: &Globals, args: &SweepArgs) -> Result<(), CliError> {
    if args.list_presets {
        let mut text = preset_names().join("\n");
        text.push('\n');
        return emit(globals.output.as_deref(), text.as_bytes());
    }
    let c = load(globals, &args.source)?;
    let axis = sweep_axis(&c, args)?;
    let scenario = scenario(&c, axis)?;
    let values = axis.values()?;
    let method = c.solver.method()?;
    let grid = run_sweep_with(&scenario, axis.param, &values, method, c.solver.eps)?;

    let mut rows = Vec::with_capacity(values.len() * grid.times.len());
    for (v, row) in grid.axis_values.iter().zip(&grid.values) {
        for (t, conc) in grid.times.iter().zip(row) {
            rows.push(vec![*v, *t, *conc]);
        }
    }
    emit(c.output.csv.as_deref(), &csv_table(&SWEEP_HEADER, rows)?)?;

    let family_matches = matches!(
        (axis.param, scenario.initial),
        (AxisParam::A, InitialState::FamilyA { .. })
            | (AxisParam::Alpha, InitialState::PsiZeroOne { .. })
    );
    let mut records = Vec::with_capacity(values.len());
    let mut comparison: Option<OracleComparison> = None;
    for (v, ev) in grid.axis_values.iter().zip(&grid.events) {
        let mut closed = None;
        let mut rel = None;
        if family_matches {
            let mut init = scenario.initial;
            let mut params = scenario.params;
            axis.param.apply(*v, &mut params, &mut init)?;
            if let Some(o) = oracle_for(&params, &init, None)? {
                let cmp = comparison.get_or_insert(OracleComparison {
                    formula: o.formula,
                    rows_compared: 0,
                    max_relative_error: 0.0,
                    mismatched_rows: Vec::new(),
                });
                match (o.closed_form_death_us, ev.death) {
                    // Separable from the start: nothing to compare.
                    (Some(0.0), _) => {}
                    (Some(t), Some(d)) => {
                        let r = (d.time - t).abs() / t;
                        cmp.rows_compared += 1;
                        cmp.max_relative_error = cmp.max_relative_error.max(r);
                        rel = Some(r);
                    }
                    (None, None) => cmp.rows_compared += 1,
                    _ => {
                        cmp.rows_compared += 1;
                        cmp.mismatched_rows.push(*v);
                    }
                }
                closed = Some(o.closed_form_death_us);
            }
        }
        records.push(RowRecord {
            axis_value: *v,
            death: ev.death.as_ref().map(EventRecord::from),
            birth: ev.birth.as_ref().map(EventRecord::from),
            closed_form_death_us: closed,
            relative_error: rel,
        });
    }

    let deaths = records.iter().filter(|r| r.death.is_some()).count();
    let births = records.iter().filter(|r| r.birth.is_some()).count();
    let mut text = format!(
        "{} rows over {} = [{}, {}]: {deaths} with a death event, {births} with a birth event\n",
        values.len(),
        axis.param.name(),
        num(axis.start),
        num(axis.stop),
    );
    if let Some(cmp) = &comparison {
        text += &format!(
            "closed form ({}): max relative error {} over {} rows, {} mismatched\n",
            cmp.formula,
            num(cmp.max_relative_error),
            cmp.rows_compared,
            cmp.mismatched_rows.len()
        );
    }
    report(c.output.csv.is_some(), &text);

    if let Some(path) = json_target(&args.sidecar, &c) {
        let summary = SweepSummary {
            schema_version: SCHEMA_VERSION,
            command: "sweep",
            preset: c.preset.clone(),
            system: c.system,
            initial_state: scenario.initial,
            axis: axis.param.name(),
            points: values.len(),
            samples: grid.times.len(),
            t_stop_us: *grid.times.last().unwrap_or(&0.0),
            solver: SolverRecord::new(method, c.solver.eps),
            rows: records,
            oracle_comparison: comparison,
        };
        emit(Some(&path), &json_bytes(&summary))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SteadyReport {
    schema_version: u32,
    command: &'static str,
    preset: Option<String>,
    system: QuotedParams,
    populations: [f64; 4],
    fluorescence_signal: f64,
    concurrence: f64,
    /// ‖L·vec(ρ)‖∞.
    residual: f64,
    rho_re: [[f64; 4]; 4],
    rho_im: [[f64; 4]; 4],
}

pub fn steady(globals: &Globals, src: &Source) -> Result<(), CliError> {
    let c = load(globals, src)?;
    let params = c.params()?;
    let ss = steady_state(&params)?;
    let l = build_liouvillian(&params)?;
    let residual = max_abs(&(l.matrix() * vec4(ss.matrix())));
    let m = ss.matrix();
    let report = SteadyReport {
        schema_version: SCHEMA_VERSION,
        command: "steady",
        preset: c.preset.clone(),
        system: c.system,
        populations: [0, 1, 2, 3].map(|k| ss.population(k)),
        fluorescence_signal: fluorescence_signal(&ss),
        concurrence: concurrence(&ss)?,
        residual,
        rho_re: [0, 1, 2, 3].map(|r| [0, 1, 2, 3].map(|col| m[(r, col)].re)),
        rho_im: [0, 1, 2, 3].map(|r| [0, 1, 2, 3].map(|col| m[(r, col)].im)),
    };
    emit(c.output.csv.as_deref(), &json_bytes(&report))
}

pub fn esd_oracle(globals: &Globals, args: &OracleArgs) -> Result<(), CliError> {
    let gamma = to_angular(args.gamma_mhz_over_2pi, Quoted::RateOver2Pi)?;
    let mut rows = Vec::with_capacity(args.values.len());
    for &v in &args.values {
        let t = match args.family {
            OracleFamily::A => esd_time_family_a(v, gamma)?,
            OracleFamily::Alpha => esd_time_alpha(v, gamma)?,
        };
        let fmt = |x: Option<f64>| x.map(num).unwrap_or_default();
        rows.push(vec![
            num(v),
            fmt(t),
            fmt(t.map(|t| t * dimer_core::units::NS_PER_US)),
        ]);
    }
    emit(
        globals.output.as_deref(),
        &csv_records(&["value", "esd_time_us", "esd_time_ns"], rows)?,
    )
}

pub fn preset_list(globals: &Globals) -> Result<(), CliError> {
    let mut text = String::new();
    for p in presets() {
        text += &format!("{}\t{}\n", p.name, p.summary);
    }
    emit(globals.output.as_deref(), text.as_bytes())
}
