use thiserror::Error;

/// Errors raised across the simulation and reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock cutoff {dim} too small: tail weight {tail:.3e} exceeds {limit:.1e}")]
    CutoffTooSmall { dim: usize, tail: f64, limit: f64 },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("value {value} outside supported range |x| <= {limit}")]
    OutOfRange { value: f64, limit: f64 },

    #[error("phase is undefined for a phase-symmetric state (contrast {contrast:.3e})")]
    DegeneratePhase { contrast: f64 },

    #[error("intensity has zero energy on the requested window")]
    ZeroEnergy,

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("insufficient phase coverage: {occupied} of {bins} phase bins occupied, need {need}")]
    InsufficientCoverage { occupied: usize, bins: usize, need: usize },

    #[error("sideband trace contrast {contrast:.4} below threshold {threshold:.4}")]
    LowContrast { contrast: f64, threshold: f64 },

    #[error("random stream for shot {shot} in domain {domain} requested twice")]
    SeedReuse { domain: u64, shot: u64 },

    #[error("inconsistent configuration: {0}")]
    Config(String),

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("malformed CSV at line {line}: {msg}")]
    MalformedCsv { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
