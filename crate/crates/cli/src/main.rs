//! `sqzmem`: simulate, reconstruct and analyse quantum-memory runs.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid configuration or
//! input, 3 I/O failure, 4 reconstruction did not converge, 5 phase
//! undefined for a phase-symmetric state.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sqzmem::fock::LogBase;
use sqzmem::pipeline::{self, exit, RunConfig, SweepParam, Variant};

#[derive(Parser)]
#[command(name = "sqzmem", version, about = "Quantum memory for squeezed light: simulation and tomography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fock cutoff for states and reconstructions.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate input and storage runs and write quadrature datasets.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "standard")]
        variant: Variant,
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Reconstruct a density matrix from a quadrature CSV.
    Reconstruct {
        data: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare an input and a retrieved density matrix.
    Report {
        rho_in: PathBuf,
        rho_retr: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        log_base: Option<LogBase>,
    },
    /// Phase of the retrieved state against detuning or storage time.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated control values (MHz or μs).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Shots per sweep point.
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Write classical waveforms and variance traces only.
    Traces {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "standard")]
        variant: Variant,
        #[arg(long)]
        shots: Option<usize>,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn load(common: &Common) -> sqzmem::Result<(RunConfig, PathBuf)> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(dim) = common.dim {
        cfg.tomography.dim = dim;
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    Ok((cfg, out))
}

fn simulate(common: &Common, variant: Variant, shots: Option<usize>, traces_only: bool) -> sqzmem::Result<i32> {
    let (mut cfg, out) = load(common)?;
    if let Some(n) = shots {
        cfg.timing.shots = n;
    }
    cfg.validate()?;
    let manifest = pipeline::cmd_simulate(&cfg, variant, &out, traces_only)?;
    for name in manifest.files.keys() {
        emit(&out.join(name).display().to_string());
    }
    Ok(exit::OK)
}

fn run(cli: Cli) -> sqzmem::Result<i32> {
    match cli.command {
        Command::Simulate { common, variant, shots } => simulate(&common, variant, shots, false),
        Command::Traces { common, variant, shots } => simulate(&common, variant, shots, true),
        Command::Reconstruct { data, common } => {
            let (cfg, out) = load(&common)?;
            let (report, _) = pipeline::cmd_reconstruct(&data, &cfg, &out)?;
            emit(&serde_json::to_string_pretty(&report)?);
            if report.converged {
                Ok(exit::OK)
            } else {
                eprintln!("error: reconstruction stopped after {} iterations without converging", report.iterations);
                Ok(exit::NOT_CONVERGED)
            }
        }
        Command::Report { rho_in, rho_retr, common, log_base } => {
            let (mut cfg, out) = load(&common)?;
            if let Some(base) = log_base {
                cfg.analysis.log_base = base;
            }
            let metrics = pipeline::cmd_report(&rho_in, &rho_retr, &cfg, &out)?;
            emit(&serde_json::to_string_pretty(&metrics)?);
            Ok(exit::OK)
        }
        Command::Sweep { common, param, values, shots } => {
            let (mut cfg, out) = load(&common)?;
            if let Some(n) = shots {
                cfg.analysis.sweep_shots = n;
            }
            let outcome = pipeline::cmd_sweep(&cfg, param, &values, &out)?;
            emit(&serde_json::to_string_pretty(&outcome.summary)?);
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match pipeline::threads_from_env() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(exit::VALIDATION as u8);
        }
    };
    let code = match pipeline::with_threads(threads, || run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            pipeline::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
