//! Time-domain homodyne acquisition.
//!
//! Each shot is a photocurrent sampled over the acquisition window. The
//! quadrature of interest is carried by a single temporal mode f(t), the
//! square root of a classical intensity waveform; every orthogonal mode
//! carries the local noise floor. Projecting onto f recovers the quadrature,
//! projecting onto a flat mode over a dark segment calibrates the shot-noise
//! level, and a slow sideband signal from the source fixes the LO phase.

pub mod acquire;
pub mod io;
pub mod lophase;
pub mod sampler;
pub mod shot;
pub mod timing;
pub mod waveform;

pub use acquire::{acquire, Acquisition};
pub use io::{read_quadratures, read_quadratures_file, write_quadratures, write_quadratures_file, QuadratureRecord};
pub use lophase::{estimate_lo_phase, fit_sideband, lo_phase_ramp, sideband_trace, SidebandFit};
pub use sampler::QuadratureSampler;
pub use shot::{
    calibrate_snl, matched_filter, stream_rng, variance_trace, NoiseComponent, ShotModel, ShotRecord, StreamRegistry,
    VarianceAccumulator,
};
pub use timing::TimingConfig;
pub use waveform::{classical_waveforms, temporal_mode, ClassicalWaveforms, TemporalMode};
