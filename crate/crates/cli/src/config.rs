//! Run configuration: a TOML document with unit-suffixed keys.
//!
//! ```toml
//! preset = "fig2a"            # optional; supplies defaults for everything below
//!
//! [system]
//! gamma1_mhz_over_2pi = 50.0  # rates are quoted as value/2π
//! v12_mhz = 950.0             # couplings and detunings as plain MHz
//!
//! [initial_state]
//! family = "psi-alpha"
//! alpha = 0.5
//!
//! [grid]
//! t_stop_lifetimes = 10.0     # or t_stop_us
//! samples = 400
//!
//! [solver]
//! method = "dopri45"
//! tol = 1e-9
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use dimer_core::entanglement::DEFAULT_EPS;
use dimer_core::propagation::{Method, DEFAULT_TOL};
use dimer_core::scenarios::{preset, AxisParam, AxisSpec, InitialState, SpectrumSpec};
use dimer_core::{DimerParams, QuotedParams};
use serde::Serialize;
use thiserror::Error;
use toml::{Table, Value};

/// The nine `[system]` keys, all required unless a preset is named.
pub const SYSTEM_KEYS: [&str; 9] = [
    "gamma1_mhz_over_2pi",
    "gamma2_mhz_over_2pi",
    "gamma12_mhz_over_2pi",
    "v12_mhz",
    "delta_minus_mhz",
    "delta_plus_mhz",
    "delta_e_mhz",
    "ell1_mhz",
    "ell2_mhz",
];

const SECTIONS: [&str; 5] = ["system", "initial_state", "grid", "solver", "output"];
const INITIAL_KEYS: [&str; 6] = ["family", "alpha", "phi", "a", "gamma", "zeta"];
const GRID_KEYS: [&str; 10] = [
    "detuning_start_mhz",
    "detuning_stop_mhz",
    "detuning_step_mhz",
    "t_stop_us",
    "t_stop_lifetimes",
    "samples",
    "axis",
    "axis_start",
    "axis_stop",
    "axis_points",
];
const SOLVER_KEYS: [&str; 4] = ["method", "tol", "eps", "rk4_step_us"];
const OUTPUT_KEYS: [&str; 2] = ["csv", "json"];

const UNIT_SUFFIXES: [&str; 11] = [
    "_mhz_over_2pi",
    "_rad_per_us",
    "_lifetimes",
    "_ghz",
    "_mhz",
    "_khz",
    "_hz",
    "_us",
    "_ns",
    "_ms",
    "_s",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("unknown key `{path}`")]
    UnknownKey { path: String },
    #[error("missing required keys: {}", keys.join(", "))]
    MissingKeys { keys: Vec<String> },
    #[error("`{path}`: unit suffix does not match, expected `{expected}` ({hint})")]
    UnitSuffix {
        path: String,
        expected: String,
        hint: &'static str,
    },
    #[error("`{path}`: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Unknown keys are errors.
    #[default]
    Strict,
    /// Unknown keys are reported as warnings and ignored.
    Permissive,
}

/// Length of the time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TimeSpan {
    Us(f64),
    /// Multiples of 1/Γ.
    Lifetimes(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub span: TimeSpan,
    pub samples: usize,
}

impl TimeGrid {
    pub fn t_stop_us(&self, params: &DimerParams) -> dimer_core::Result<f64> {
        Ok(match self.span {
            TimeSpan::Us(t) => t,
            TimeSpan::Lifetimes(n) => n / params.reference_rate()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GridConfig {
    pub detuning: Option<SpectrumSpec>,
    pub time: Option<TimeGrid>,
    pub axis: Option<AxisSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    Dopri45,
    Rk4,
    Expm,
}

impl MethodKind {
    fn name(&self) -> &'static str {
        match self {
            MethodKind::Dopri45 => "dopri45",
            MethodKind::Rk4 => "rk4",
            MethodKind::Expm => "expm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub method: MethodKind,
    pub tol: f64,
    pub eps: f64,
    pub rk4_step_us: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: MethodKind::Dopri45,
            tol: DEFAULT_TOL,
            eps: DEFAULT_EPS,
            rk4_step_us: None,
        }
    }
}

impl SolverConfig {
    pub fn method(&self) -> Result<Method, ConfigError> {
        Ok(match self.method {
            MethodKind::Dopri45 => Method::Dopri45 { tol: self.tol },
            MethodKind::Expm => Method::Expm,
            MethodKind::Rk4 => Method::Rk4 {
                step: self.rk4_step_us.ok_or_else(|| {
                    invalid("solver.rk4_step_us", "required when method = \"rk4\"")
                })?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// A fully resolved configuration: preset defaults merged with explicit keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub system: QuotedParams,
    pub initial_state: Option<InitialState>,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Parameters in rad/µs, validated.
    pub fn params(&self) -> Result<DimerParams, ConfigError> {
        self.system.to_params().map_err(|e| match e {
            dimer_core::Error::InvalidParameter { name, reason } => {
                invalid(system_key(name), reason)
            }
            other => invalid("system", other.to_string()),
        })
    }
}

fn system_key(param: &str) -> String {
    let key = SYSTEM_KEYS
        .iter()
        .find(|k| {
            k.strip_prefix(param)
                .is_some_and(|rest| rest.starts_with("_mhz"))
        })
        .copied()
        .unwrap_or("system");
    format!("system.{key}")
}

/// Parsed configuration plus any warnings about ignored keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

/// Parses in strict mode.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, Strictness::Strict).map(|p| p.config)
}

pub fn parse_config_with(text: &str, strictness: Strictness) -> Result<Parsed, ConfigError> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
    let mut cx = Checker {
        strictness,
        warnings: Vec::new(),
    };

    let mut top_allowed: Vec<&str> = SECTIONS.to_vec();
    top_allowed.push("preset");
    cx.check_keys("", &doc, &top_allowed)?;

    let preset_name = match doc.get("preset") {
        None => None,
        Some(v) => Some(as_str("preset", v)?.to_string()),
    };
    let base = match &preset_name {
        Some(name) => Some(preset(name).map_err(|e| invalid("preset", e.to_string()))?),
        None => None,
    };

    let system_table = section(&doc, "system")?;
    let initial_table = section(&doc, "initial_state")?;
    let grid_table = section(&doc, "grid")?;
    let solver_table = section(&doc, "solver")?;
    let output_table = section(&doc, "output")?;

    // System.
    cx.check_keys("system", &system_table, &SYSTEM_KEYS)?;
    let missing: Vec<String> = SYSTEM_KEYS
        .iter()
        .filter(|k| !system_table.contains_key(**k))
        .map(|k| format!("system.{k}"))
        .collect();
    if base.is_none() && !missing.is_empty() {
        return Err(ConfigError::MissingKeys { keys: missing });
    }
    let mut system = base.as_ref().map(|p| p.quoted).unwrap_or_default();
    {
        let fields: [&mut f64; 9] = [
            &mut system.gamma1_mhz_over_2pi,
            &mut system.gamma2_mhz_over_2pi,
            &mut system.gamma12_mhz_over_2pi,
            &mut system.v12_mhz,
            &mut system.delta_minus_mhz,
            &mut system.delta_plus_mhz,
            &mut system.delta_e_mhz,
            &mut system.ell1_mhz,
            &mut system.ell2_mhz,
        ];
        for (key, field) in SYSTEM_KEYS.iter().zip(fields) {
            if let Some(v) = system_table.get(*key) {
                *field = as_f64(&format!("system.{key}"), v)?;
            }
        }
    }

    // Initial state.
    cx.check_keys("initial_state", &initial_table, &INITIAL_KEYS)?;
    let initial_state = parse_initial(&initial_table, base.as_ref().map(|p| p.initial))?;

    // Grid.
    cx.check_keys("grid", &grid_table, &GRID_KEYS)?;
    let grid = parse_grid(&grid_table, base.as_ref())?;

    // Solver.
    cx.check_keys("solver", &solver_table, &SOLVER_KEYS)?;
    let mut solver = SolverConfig::default();
    if let Some(v) = solver_table.get("method") {
        solver.method = match as_str("solver.method", v)? {
            "dopri45" => MethodKind::Dopri45,
            "rk4" => MethodKind::Rk4,
            "expm" => MethodKind::Expm,
            other => {
                return Err(invalid(
                    "solver.method",
                    format!("unknown method `{other}` (expected dopri45, rk4 or expm)"),
                ))
            }
        };
    }
    if let Some(v) = solver_table.get("tol") {
        solver.tol = as_f64("solver.tol", v)?;
    }
    if let Some(v) = solver_table.get("eps") {
        solver.eps = as_f64("solver.eps", v)?;
        if !(solver.eps > 0.0) {
            return Err(invalid("solver.eps", "must be positive"));
        }
    }
    if let Some(v) = solver_table.get("rk4_step_us") {
        solver.rk4_step_us = Some(as_f64("solver.rk4_step_us", v)?);
    }

    // Output.
    cx.check_keys("output", &output_table, &OUTPUT_KEYS)?;
    let output = OutputConfig {
        csv: output_table
            .get("csv")
            .map(|v| as_str("output.csv", v).map(PathBuf::from))
            .transpose()?,
        json: output_table
            .get("json")
            .map(|v| as_str("output.json", v).map(PathBuf::from))
            .transpose()?,
    };

    let config = RunConfig {
        preset: preset_name,
        system,
        initial_state,
        grid,
        solver,
        output,
    };
    config.params()?;
    Ok(Parsed {
        config,
        warnings: cx.warnings,
    })
}

/// Writes a config back out as TOML. Every resolved value is explicit, so
/// `parse_config(&serialize_config(c)) == c`.
pub fn serialize_config(c: &RunConfig) -> String {
    let mut doc = Table::new();
    if let Some(p) = &c.preset {
        doc.insert("preset".into(), Value::String(p.clone()));
    }

    let q = &c.system;
    let values = [
        q.gamma1_mhz_over_2pi,
        q.gamma2_mhz_over_2pi,
        q.gamma12_mhz_over_2pi,
        q.v12_mhz,
        q.delta_minus_mhz,
        q.delta_plus_mhz,
        q.delta_e_mhz,
        q.ell1_mhz,
        q.ell2_mhz,
    ];
    let mut system = Table::new();
    for (k, v) in SYSTEM_KEYS.iter().zip(values) {
        system.insert((*k).into(), Value::Float(v));
    }
    doc.insert("system".into(), Value::Table(system));

    if let Some(init) = &c.initial_state {
        let mut t = Table::new();
        t.insert("family".into(), Value::String(init.family_name().into()));
        let mut put = |k: &str, v: f64| {
            t.insert(k.into(), Value::Float(v));
        };
        match *init {
            InitialState::PsiAlpha { alpha, phi } | InitialState::PsiZeroOne { alpha, phi } => {
                put("alpha", alpha);
                put("phi", phi);
            }
            InitialState::FamilyA { a } => put("a", a),
            InitialState::Product { gamma, zeta } => {
                put("gamma", gamma);
                put("zeta", zeta);
            }
            InitialState::ExcitedProduct { alpha } => put("alpha", alpha),
        }
        doc.insert("initial_state".into(), Value::Table(t));
    }

    let mut grid = Table::new();
    if let Some(d) = c.grid.detuning {
        grid.insert("detuning_start_mhz".into(), Value::Float(d.start_mhz));
        grid.insert("detuning_stop_mhz".into(), Value::Float(d.stop_mhz));
        grid.insert("detuning_step_mhz".into(), Value::Float(d.step_mhz));
    }
    if let Some(t) = c.grid.time {
        match t.span {
            TimeSpan::Us(v) => grid.insert("t_stop_us".into(), Value::Float(v)),
            TimeSpan::Lifetimes(v) => grid.insert("t_stop_lifetimes".into(), Value::Float(v)),
        };
        grid.insert("samples".into(), Value::Integer(t.samples as i64));
    }
    if let Some(a) = c.grid.axis {
        grid.insert("axis".into(), Value::String(a.param.name().into()));
        grid.insert("axis_start".into(), Value::Float(a.start));
        grid.insert("axis_stop".into(), Value::Float(a.stop));
        grid.insert("axis_points".into(), Value::Integer(a.points as i64));
    }
    if !grid.is_empty() {
        doc.insert("grid".into(), Value::Table(grid));
    }

    let mut solver = Table::new();
    solver.insert(
        "method".into(),
        Value::String(c.solver.method.name().into()),
    );
    solver.insert("tol".into(), Value::Float(c.solver.tol));
    solver.insert("eps".into(), Value::Float(c.solver.eps));
    if let Some(h) = c.solver.rk4_step_us {
        solver.insert("rk4_step_us".into(), Value::Float(h));
    }
    doc.insert("solver".into(), Value::Table(solver));

    let mut output = Table::new();
    if let Some(p) = &c.output.csv {
        output.insert(
            "csv".into(),
            Value::String(p.to_string_lossy().into_owned()),
        );
    }
    if let Some(p) = &c.output.json {
        output.insert(
            "json".into(),
            Value::String(p.to_string_lossy().into_owned()),
        );
    }
    if !output.is_empty() {
        doc.insert("output".into(), Value::Table(output));
    }

    toml::to_string(&doc).expect("a table of plain values always serializes")
}

struct Checker {
    strictness: Strictness,
    warnings: Vec<String>,
}

impl Checker {
    fn check_keys(
        &mut self,
        section: &str,
        table: &Table,
        allowed: &[&str],
    ) -> Result<(), ConfigError> {
        for key in table.keys() {
            if allowed.contains(&key.as_str()) {
                continue;
            }
            let path = if section.is_empty() {
                key.clone()
            } else {
                format!("{section}.{key}")
            };
            if let Some(expected) = suffix_mismatch(key, allowed) {
                return Err(ConfigError::UnitSuffix {
                    path,
                    hint: unit_hint(expected),
                    expected: expected.to_string(),
                });
            }
            match self.strictness {
                Strictness::Strict => return Err(ConfigError::UnknownKey { path }),
                Strictness::Permissive => {
                    self.warnings.push(format!("ignoring unknown key `{path}`"))
                }
            }
        }
        Ok(())
    }
}

fn stem(key: &str) -> &str {
    UNIT_SUFFIXES
        .iter()
        .find_map(|s| key.strip_suffix(s))
        .unwrap_or(key)
}

/// The allowed key sharing `key`'s stem, when only the unit differs.
fn suffix_mismatch<'a>(key: &str, allowed: &[&'a str]) -> Option<&'a str> {
    let s = stem(key);
    allowed.iter().find(|a| stem(a) == s && **a != key).copied()
}

fn unit_hint(expected: &str) -> &'static str {
    if expected.ends_with("_mhz_over_2pi") {
        "decay rates are quoted in MHz divided by 2π"
    } else if expected.ends_with("_mhz") {
        "couplings and detunings are ordinary frequencies in MHz"
    } else if expected.ends_with("_us") {
        "times are in microseconds"
    } else {
        "see the documented key list"
    }
}

fn section(doc: &Table, name: &str) -> Result<Table, ConfigError> {
    match doc.get(name) {
        None => Ok(Table::new()),
        Some(Value::Table(t)) => Ok(t.clone()),
        Some(_) => Err(invalid(name, "expected a table")),
    }
}

fn as_f64(path: &str, v: &Value) -> Result<f64, ConfigError> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(invalid(path, "expected a number")),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(path, "must be finite"))
    }
}

fn as_usize(path: &str, v: &Value) -> Result<usize, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(invalid(path, "expected a non-negative integer")),
    }
}

fn as_str<'a>(path: &str, v: &'a Value) -> Result<&'a str, ConfigError> {
    v.as_str().ok_or_else(|| invalid(path, "expected a string"))
}

fn parse_initial(
    t: &Table,
    base: Option<InitialState>,
) -> Result<Option<InitialState>, ConfigError> {
    if t.is_empty() {
        return Ok(base);
    }
    let family = match t.get("family") {
        Some(v) => as_str("initial_state.family", v)?.to_string(),
        None => match base {
            Some(b) => b.family_name().to_string(),
            None => {
                return Err(ConfigError::MissingKeys {
                    keys: vec!["initial_state.family".into()],
                })
            }
        },
    };
    // Fields not given fall back to the preset's state of the same family.
    let inherit = base.filter(|b| b.family_name() == family);
    let get = |key: &str, fallback: Option<f64>| -> Result<f64, ConfigError> {
        match t.get(key) {
            Some(v) => as_f64(&format!("initial_state.{key}"), v),
            None => fallback.ok_or_else(|| ConfigError::MissingKeys {
                keys: vec![format!("initial_state.{key}")],
            }),
        }
    };
    let (state, used): (InitialState, &[&str]) = match family.as_str() {
        "psi-alpha" | "psi-zero-one" => {
            let (a0, p0) = match inherit {
                Some(InitialState::PsiAlpha { alpha, phi }) | Some(InitialState::PsiZeroOne { alpha, phi }) => {
                    (Some(alpha), Some(phi))
                }
                _ => (None, Some(0.0)),
            };
            let alpha = get("alpha", a0)?;
            let phi = get("phi", p0)?;
            let s = if family == "psi-alpha" {
                InitialState::PsiAlpha { alpha, phi }
            } else {
                InitialState::PsiZeroOne { alpha, phi }
            };
            (s, &["family", "alpha", "phi"])
        }
        "family-a" => {
            let a0 = match inherit {
                Some(InitialState::FamilyA { a }) => Some(a),
                _ => None,
            };
            (InitialState::FamilyA { a: get("a", a0)? }, &["family", "a"])
        }
        "product" => {
            let (g0, z0) = match inherit {
                Some(InitialState::Product { gamma, zeta }) => (Some(gamma), Some(zeta)),
                _ => (None, None),
            };
            (
                InitialState::Product {
                    gamma: get("gamma", g0)?,
                    zeta: get("zeta", z0)?,
                },
                &["family", "gamma", "zeta"],
            )
        }
        "excited-product" => {
            let a0 = match inherit {
                Some(InitialState::ExcitedProduct { alpha }) => Some(alpha),
                _ => None,
            };
            (InitialState::ExcitedProduct { alpha: get("alpha", a0)? }, &["family", "alpha"])
        }
        other => {
            return Err(invalid(
                "initial_state.family",
                format!("unknown family `{other}` (expected psi-alpha, psi-zero-one, family-a, product or excited-product)"),
            ))
        }
    };
    let used: BTreeSet<&str> = used.iter().copied().collect();
    if let Some(k) = t.keys().find(|k| !used.contains(k.as_str())) {
        return Err(invalid(
            format!("initial_state.{k}"),
            format!("not a parameter of the {family} family"),
        ));
    }
    state
        .build()
        .map_err(|e| invalid("initial_state", e.to_string()))?;
    Ok(Some(state))
}

fn parse_grid(
    t: &Table,
    base: Option<&dimer_core::scenarios::ScenarioPreset>,
) -> Result<GridConfig, ConfigError> {
    let mut grid = GridConfig {
        detuning: base.and_then(|p| p.spectrum),
        time: base.map(|p| TimeGrid {
            span: TimeSpan::Lifetimes(p.horizon_lifetimes),
            samples: p.samples,
        }),
        axis: base.and_then(|p| p.axis),
    };

    let f = |k: &str| {
        t.get(k)
            .map(|v| as_f64(&format!("grid.{k}"), v))
            .transpose()
    };

    let det = [
        f("detuning_start_mhz")?,
        f("detuning_stop_mhz")?,
        f("detuning_step_mhz")?,
    ];
    if det.iter().any(Option::is_some) {
        let d = grid.detuning;
        let spec = SpectrumSpec {
            start_mhz: det[0]
                .or(d.map(|d| d.start_mhz))
                .ok_or_else(|| missing("grid.detuning_start_mhz"))?,
            stop_mhz: det[1]
                .or(d.map(|d| d.stop_mhz))
                .ok_or_else(|| missing("grid.detuning_stop_mhz"))?,
            step_mhz: det[2]
                .or(d.map(|d| d.step_mhz))
                .ok_or_else(|| missing("grid.detuning_step_mhz"))?,
        };
        grid.detuning = Some(spec);
    }

    let (us, lifetimes) = (f("t_stop_us")?, f("t_stop_lifetimes")?);
    if us.is_some() && lifetimes.is_some() {
        return Err(invalid(
            "grid.t_stop_us",
            "give either t_stop_us or t_stop_lifetimes, not both",
        ));
    }
    let samples = t
        .get("samples")
        .map(|v| as_usize("grid.samples", v))
        .transpose()?;
    if us.is_some() || lifetimes.is_some() || samples.is_some() {
        let span = match (us, lifetimes) {
            (Some(x), _) => TimeSpan::Us(x),
            (_, Some(x)) => TimeSpan::Lifetimes(x),
            _ => grid
                .time
                .map(|g| g.span)
                .ok_or_else(|| missing("grid.t_stop_us"))?,
        };
        let samples = samples
            .or(grid.time.map(|g| g.samples))
            .unwrap_or(dimer_core::scenarios::DEFAULT_SAMPLES);
        grid.time = Some(TimeGrid { span, samples });
    }

    let name = t.get("axis").map(|v| as_str("grid.axis", v)).transpose()?;
    let (start, stop) = (f("axis_start")?, f("axis_stop")?);
    let points = t
        .get("axis_points")
        .map(|v| as_usize("grid.axis_points", v))
        .transpose()?;
    if name.is_some() || start.is_some() || stop.is_some() || points.is_some() {
        let param = match name {
            Some(n) => AxisParam::parse(n).map_err(|e| invalid("grid.axis", e.to_string()))?,
            None => grid
                .axis
                .map(|a| a.param)
                .ok_or_else(|| missing("grid.axis"))?,
        };
        // A different axis does not inherit the preset's range.
        let inherit = grid.axis.filter(|a| a.param == param);
        grid.axis = Some(AxisSpec {
            param,
            start: start
                .or(inherit.map(|a| a.start))
                .ok_or_else(|| missing("grid.axis_start"))?,
            stop: stop
                .or(inherit.map(|a| a.stop))
                .ok_or_else(|| missing("grid.axis_stop"))?,
            points: points
                .or(inherit.map(|a| a.points))
                .unwrap_or(dimer_core::scenarios::DEFAULT_AXIS_POINTS),
        });
    }
    Ok(grid)
}

fn missing(key: &str) -> ConfigError {
    ConfigError::MissingKeys {
        keys: vec![key.into()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1A: &str = r#"
        [system]
        gamma1_mhz_over_2pi = 50
        gamma2_mhz_over_2pi = 50
        gamma12_mhz_over_2pi = 9
        v12_mhz = 950
        delta_minus_mhz = 2320
        delta_plus_mhz = 0
        delta_e_mhz = -160
        ell1_mhz = 200
        ell2_mhz = 200
    "#;

    #[test]
    fn explicit_system_matches_preset() {
        let c = parse_config(FIG1A).unwrap();
        assert_eq!(c.params().unwrap(), preset("fig1a").unwrap().params);
    }

    #[test]
    fn empty_document_lists_every_system_key() {
        match parse_config("") {
            Err(ConfigError::MissingKeys { keys }) => {
                assert_eq!(keys.len(), 9);
                assert!(keys.contains(&"system.gamma12_mhz_over_2pi".to_string()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collective_rate_bound_is_enforced_with_key_path() {
        let text = "preset = \"fig1a\"\n[system]\ngamma12_mhz_over_2pi = 60\n";
        match parse_config(text) {
            Err(ConfigError::Invalid { path, .. }) => {
                assert_eq!(path, "system.gamma12_mhz_over_2pi")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_unit_suffix_is_named() {
        let text = "preset = \"fig1a\"\n[system]\ngamma1_mhz = 50\n";
        match parse_config(text) {
            Err(ConfigError::UnitSuffix { path, expected, .. }) => {
                assert_eq!(path, "system.gamma1_mhz");
                assert_eq!(expected, "gamma1_mhz_over_2pi");
            }
            other => panic!("{other:?}"),
        }
        let text = "preset = \"fig2a\"\n[grid]\nt_stop_ns = 5\n";
        assert!(matches!(
            parse_config(text),
            Err(ConfigError::UnitSuffix { .. })
        ));
    }

    #[test]
    fn unknown_keys_are_rejected_unless_permissive() {
        let text = "preset = \"fig1a\"\n[system]\nfuture_knob = 1\n";
        assert_eq!(
            parse_config(text),
            Err(ConfigError::UnknownKey {
                path: "system.future_knob".into()
            })
        );
        let parsed = parse_config_with(text, Strictness::Permissive).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(
            parsed.config.params().unwrap(),
            preset("fig1a").unwrap().params
        );
        assert!(parse_config("[extras]\nx = 1").is_err());
    }

    #[test]
    fn initial_state_keys_must_belong_to_the_family() {
        let text = "preset = \"fig2a\"\n[initial_state]\nfamily = \"family-a\"\nalpha = 0.2\n";
        assert!(matches!(
            parse_config(text),
            Err(ConfigError::MissingKeys { .. })
        ));
        let text =
            "preset = \"fig2a\"\n[initial_state]\nfamily = \"family-a\"\na = 0.2\nalpha = 0.1\n";
        assert!(matches!(
            parse_config(text),
            Err(ConfigError::Invalid { .. })
        ));
        let text = "preset = \"fig2a\"\n[initial_state]\nalpha = 0.2\n";
        assert_eq!(
            parse_config(text).unwrap().initial_state,
            Some(InitialState::PsiAlpha {
                alpha: 0.2,
                phi: 0.0
            })
        );
    }

    #[test]
    fn round_trip_is_exact() {
        let mut texts = vec![FIG1A.to_string()];
        for name in dimer_core::scenarios::preset_names() {
            texts.push(format!(
                "preset = \"{name}\"\n[solver]\ntol = 3.3e-10\n[output]\ncsv = \"out/x.csv\"\n"
            ));
        }
        texts.push(
            "preset = \"fig8a\"\n[grid]\nt_stop_us = 0.123456789\nsamples = 7\naxis = \"ell_mhz\"\naxis_start = 1\naxis_stop = 9.5\n[solver]\nmethod = \"rk4\"\nrk4_step_us = 1e-5\n"
                .into(),
        );
        for text in texts {
            let c = parse_config(&text).unwrap();
            let again = parse_config(&serialize_config(&c)).unwrap();
            assert_eq!(again, c, "{text}");
        }
    }
}
