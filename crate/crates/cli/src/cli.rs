use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands;
use crate::error::{exit, CliError};

/// Thread-count override consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "DIMER_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "dimer",
    version,
    about = "Entanglement dynamics of a driven, dipole-coupled emitter pair"
)]
pub struct Cli {
    /// Integrator tolerance (overrides solver.tol).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for scans and sweeps (overrides DIMER_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Main output file; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Ignore unknown config keys with a warning instead of failing.
    #[arg(long, global = true)]
    pub permissive: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state fluorescence spectrum over the laser detuning.
    Spectrum(Source),
    /// One trajectory with concurrence, populations and coherences.
    Evolve(EvolveArgs),
    /// Concurrence on an (axis value × time) grid.
    Sweep(SweepArgs),
    /// Steady state of one parameter set.
    Steady(Source),
    /// Closed-form disentanglement times.
    EsdOracle(OracleArgs),
    /// Preset registry.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetAction {
    /// List preset names with a one-line summary.
    List,
}

/// Where the run configuration comes from.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// TOML run configuration.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Named preset; overrides the config's `preset` key.
    #[arg(long, short)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub source: Source,
    /// JSON sidecar path (default: next to --output when given).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    /// Print the preset names and exit.
    #[arg(long)]
    pub list_presets: bool,
    /// Axis to vary (alpha, a, gamma, zeta, ell_mhz, delta_e_mhz).
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// JSON event summary path (default: next to --output when given).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleFamily {
    /// X states (a/3, 1/3, 1/3, (1−a)/3) with coherence 1/3.
    A,
    /// √α|00⟩ + √(1−α)|11⟩.
    Alpha,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub family: OracleFamily,
    /// Family parameter values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Decay rate Γ/2π in MHz.
    #[arg(long, default_value_t = 50.0)]
    pub gamma_mhz_over_2pi: f64,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
        }
    };
    match execute(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count"))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Usage("thread count must be at least 1".into()));
    }
    Ok(n)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let globals = commands::Globals {
        tol: cli.tol,
        output: cli.output,
        permissive: cli.permissive,
    };
    pool.install(|| match cli.command {
        Command::Spectrum(src) => commands::spectrum(&globals, &src),
        Command::Evolve(args) => commands::evolve(&globals, &args),
        Command::Sweep(args) => commands::sweep(&globals, &args),
        Command::Steady(src) => commands::steady(&globals, &src),
        Command::EsdOracle(args) => commands::esd_oracle(&globals, &args),
        Command::Preset {
            action: PresetAction::List,
        } => commands::preset_list(&globals),
    })
}
