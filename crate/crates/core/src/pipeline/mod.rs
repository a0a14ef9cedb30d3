//! Batch commands: simulate a dataset, reconstruct states from it, report
//! figures of merit, sweep the storage phase.
//!
//! Every command reads one [`RunConfig`], writes plain CSV/JSON files into
//! an output directory and records their hashes in a manifest. Outputs
//! depend only on the configuration and the seed, never on the number of
//! worker threads.

pub mod config;
pub mod manifest;
pub mod metrics;
pub mod reconstruct;
pub mod simulate;
pub mod sweep;

pub use config::{AnalysisConfig, RunConfig, SourceConfig};
pub use manifest::{git_blob_hash, RunManifest};
pub use metrics::{cmd_report, compute_metrics, Metrics, StateSummary};
pub use reconstruct::{cmd_reconstruct, reconstruct_records};
pub use simulate::{cmd_simulate, model_states, simulate, Dataset, ModelStates, RunData, Variant};
pub use sweep::{cmd_sweep, run_sweep, SweepOutcome, SweepParam, SweepRow, SweepSummary};

use crate::error::Error;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SQZMEM_THREADS";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const IO: i32 = 3;
    pub const NOT_CONVERGED: i32 = 4;
    pub const DEGENERATE_PHASE: i32 = 5;
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => exit::IO,
        Error::DegeneratePhase { .. } => exit::DEGENERATE_PHASE,
        Error::SeedReuse { .. } => exit::INTERNAL,
        _ => exit::VALIDATION,
    }
}

/// Worker count from `SQZMEM_THREADS`, `None` when unset.
pub fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV}={s} is not a positive integer")),
        },
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool").install(f)
}
