//! `lambda-holo`: compile noncyclic holonomic gates, simulate them, run the batch sweeps
//! and export waveforms.
//!
//! Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_eps, AmplitudeChoice, Figure, GridSpec, MetricChoice, RunConfig, SchemeChoice};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] lambda_holonomy::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(e) if e.is_usage() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lambda-holo", version, about = "Noncyclic holonomic gates on a Λ system")]
struct Cli {
    /// TOML run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, env = "LAMBDA_HOLO_WORKERS")]
    workers: Option<usize>,
    /// Add a wall-clock timestamp to output records.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a gate to a waveform file and a summary record.
    Compile(CompileArgs),
    /// Evolve a compiled gate under decoherence and Rabi errors.
    Simulate(SimulateArgs),
    /// Batch sweeps and figure presets.
    Sweep(SweepArgs),
    /// Convert a waveform file to per-channel I/Q columns.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct GateArgs {
    /// Rotation angle θ in [0, π].
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Axis phase φ (rad).
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Profile amplitude, or `auto` to minimise the pulse area.
    #[arg(long = "A", value_name = "A|auto")]
    amplitude: Option<AmplitudeChoice>,
    /// Gate duration (ns).
    #[arg(long = "T", value_name = "NS", conflicts_with = "rabi_cap")]
    total: Option<f64>,
    /// Peak coupling max|Ω_k|/2 (rad/ns); fixes the duration.
    #[arg(long)]
    rabi_cap: Option<f64>,
    /// Samples per half of the schedule (even).
    #[arg(long, conflicts_with = "dt")]
    samples: Option<usize>,
    /// Sample spacing (ns); rounded so each half has an even sample count.
    #[arg(long)]
    dt: Option<f64>,
    /// Platform tag recorded in the waveform: transmon-1q, transmon-2q, nv-1q or nv-2q.
    #[arg(long)]
    platform: Option<String>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Decay rate out of |e⟩ (rad/ns).
    #[arg(long)]
    gamma1: Option<f64>,
    /// Dephasing rate (rad/ns).
    #[arg(long)]
    gamma2: Option<f64>,
    /// Static Rabi errors `e0,e1`.
    #[arg(long, value_parser = parse_eps, allow_hyphen_values = true)]
    eps: Option<[f64; 2]>,
}

#[derive(Debug, Args)]
struct CompileArgs {
    #[command(flatten)]
    gate: GateArgs,
    /// Waveform output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary record path.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    gate: GateArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Simulate a waveform file instead of compiling.
    #[arg(long)]
    waveform: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeChoice>,
    #[arg(long, value_enum)]
    metric: Option<MetricChoice>,
    /// Input state cos a|0⟩ + sin a|1⟩ for the state fidelity.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    psi0_angle: f64,
    /// Input states in the gate-fidelity average.
    #[arg(long)]
    fidelity_states: Option<usize>,
    /// Write the (t, P0, Pe, P1, F) trace as CSV.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Result record path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    gate: GateArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Figure preset.
    #[arg(long, value_enum)]
    fig: Option<Figure>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeChoice>,
    #[arg(long, value_enum)]
    metric: Option<MetricChoice>,
    /// Rabi-error grid `lo:hi:n`, used on both axes.
    #[arg(long, allow_hyphen_values = true)]
    eps_grid: Option<GridSpec>,
    /// θ points for the minimum-area curve.
    #[arg(long)]
    theta_points: Option<usize>,
    /// Amplitude grid `lo:hi:n` for the area curve.
    #[arg(long)]
    amplitudes: Option<GridSpec>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Waveform file to convert.
    #[arg(long)]
    waveform: PathBuf,
    /// I/Q CSV output path.
    #[arg(long)]
    out: PathBuf,
}

impl GateArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.theta = self.theta;
        cfg.phi = self.phi;
        cfg.amplitude = self.amplitude;
        cfg.total = self.total;
        cfg.rabi_cap = self.rabi_cap;
        cfg.samples_per_segment = self.samples;
        cfg.dt = self.dt;
        cfg.platform = self.platform;
    }
}

impl NoiseArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.gamma1 = self.gamma1;
        cfg.gamma2 = self.gamma2;
        cfg.eps = self.eps;
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut flags = RunConfig {
        workers: cli.workers,
        timestamp: cli.timestamp.then_some(true),
        ..Default::default()
    };
    match cli.command {
        Command::Compile(a) => {
            a.gate.apply(&mut flags);
            flags.out = a.out;
            flags.summary = a.summary;
            commands::compile(&flags.over(file))
        }
        Command::Simulate(a) => {
            a.gate.apply(&mut flags);
            a.noise.apply(&mut flags);
            flags.scheme = a.scheme;
            flags.metric = a.metric;
            flags.fidelity_states = a.fidelity_states;
            flags.record = a.record;
            flags.out = a.out;
            commands::simulate(&flags.over(file), a.waveform.as_deref(), a.psi0_angle)
        }
        Command::Sweep(a) => {
            a.gate.apply(&mut flags);
            a.noise.apply(&mut flags);
            flags.figure = a.fig;
            flags.scheme = a.scheme;
            flags.metric = a.metric;
            flags.eps_grid = a.eps_grid;
            flags.theta_grid_points = a.theta_points;
            flags.amplitude_grid = a.amplitudes;
            flags.out_dir = a.out_dir;
            commands::sweep(&flags.over(file))
        }
        Command::Export(a) => commands::export(&a.waveform, &a.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
