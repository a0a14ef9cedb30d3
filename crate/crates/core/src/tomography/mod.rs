//! Homodyne tomography: likelihood maximisation over density matrices,
//! phase-binned variances, bootstrap errors and the unwrapping of mod-π
//! phases onto a line.
//!
//! Records carry quadratures in SNL units; the projectors work in absolute
//! units, x_abs = x_snl/√2.

pub mod binned;
pub mod bootstrap;
pub mod mle;
pub mod phase;
pub mod report;

pub use binned::{binned_variance, variance_error_db, PhaseBin};
pub use bootstrap::{bootstrap_uncertainty, BootstrapSummary};
pub use mle::{mle_reconstruct, povm_element, Cells, ReconstructionOptions, ReconstructionResult, XBinning};
pub use phase::{extract_phase, extract_phase_resolved, unwrap_to_line, PhasePoint, SweepMode, UnwrapFit};
pub use report::ReconstructionReport;
