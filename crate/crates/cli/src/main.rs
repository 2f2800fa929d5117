//! `qsinn`: landscapes, classical training and sweeps, brute-force search,
//! Grover training and circuit self-checks.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 internal failure.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{DumpTarget, Model};
use config::{ConfigError, List};

#[derive(Parser, Debug)]
#[command(name = "qsinn", version, about = "Sinusoidal networks: classical training and Grover training on a simulator")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat `key = value` file; keys mirror long flag names.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Toy loss landscape on a square grid (landscape.csv).
    Landscape(LandscapeArgs),
    /// Gradient-descent runs of one model over several seeds.
    TrainClassical(TrainClassicalArgs),
    /// Architecture × seed sweep (sweep.csv, heatmap.csv).
    Sweep(SweepArgs),
    /// Exhaustive search over all sign assignments (bruteforce.csv).
    BruteForce(BruteForceArgs),
    /// Grover/phase-estimation training on a simulator.
    TrainQuantum(TrainQuantumArgs),
    /// Exhaustive equivalence checks of the sine and plus circuits.
    VerifyCircuits(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct LandscapeArgs {
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TrainClassicalArgs {
    /// toy, toy-discrete, sinnn or dsinnn.
    #[arg(long)]
    model: Option<Model>,
    /// Number of runs.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// First hidden width (sinnn/dsinnn).
    #[arg(long)]
    width: Option<usize>,
    /// Hidden layers (sinnn/dsinnn).
    #[arg(long)]
    layers: Option<usize>,
    /// Toy initialization interval.
    #[arg(long, allow_hyphen_values = true)]
    init_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    init_hi: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// sinnn or dsinnn.
    #[arg(long)]
    model: Option<Model>,
    /// First-layer widths, comma separated.
    #[arg(long)]
    widths: Option<List<usize>>,
    /// Hidden-layer counts, comma separated.
    #[arg(long)]
    layers: Option<List<usize>>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Dataset seed (default: the master seed).
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    bad_factor: Option<f64>,
    #[arg(long)]
    bad_margin: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BruteForceArgs {
    /// `toy` or a file of `k, n, y` lines.
    #[arg(long)]
    dataset: Option<String>,
    /// Hidden widths, comma separated.
    #[arg(long)]
    hidden: Option<List<usize>>,
    /// Also run Grover training and compare call counts.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    with_quantum: Option<bool>,
}

#[derive(Args, Debug)]
pub struct TrainQuantumArgs {
    /// `toy` or a file of `k, n, y` lines.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    hidden: Option<List<usize>>,
    /// Phase qubits N′.
    #[arg(long)]
    phase_bits: Option<usize>,
    /// Oracle threshold τ of the fixed-threshold run behind density dumps.
    #[arg(long)]
    threshold: Option<f64>,
    /// Grover iterations of the fixed-threshold run.
    #[arg(long)]
    iterations: Option<u64>,
    /// Reduced density matrices to write: phase, weight, final (comma separated).
    #[arg(long)]
    dump_density: Option<List<DumpTarget>>,
    /// dense, sparse or auto.
    #[arg(long)]
    backend: Option<commands::BackendArg>,
    #[arg(long)]
    delta: Option<f64>,
    /// Weight index whose qubit carries the checker phase.
    #[arg(long)]
    phase_carrier: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    max_n: Option<u32>,
    #[arg(long)]
    max_m: Option<u32>,
    #[arg(long)]
    max_fan_in: Option<usize>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<qsinn::Error>() {
        Some(
            qsinn::Error::InvalidConfig(_)
            | qsinn::Error::InvalidDataset(_)
            | qsinn::Error::InvalidNetwork(_)
            | qsinn::Error::InvalidCircuit(_)
            | qsinn::Error::NotRepresentable(..)
            | qsinn::Error::SearchTooLarge { .. }
            | qsinn::Error::TooManyQubits { .. },
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.global, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
