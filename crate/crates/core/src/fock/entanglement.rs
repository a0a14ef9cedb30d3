use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::beamsplitter::split_on_beamsplitter;
use crate::fock::state::{DensityMatrix, TwoModeDensityMatrix};

/// Logarithm base for entropy-like quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    /// Converts a value in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Two => nats / std::f64::consts::LN_2,
            LogBase::E => nats,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(format!("log base must be '2' or 'e', got '{other}'")),
        }
    }
}

/// E_N = log ‖ρ^{T_B}‖₁, clamped at zero against round-off.
pub fn log_negativity(rho2: &TwoModeDensityMatrix, base: LogBase) -> f64 {
    let eig = SymmetricEigen::new(rho2.partial_transpose_b());
    let trace_norm: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum();
    base.log(trace_norm).max(0.0)
}

/// Log-negativity of the state split on a balanced beamsplitter with vacuum.
pub fn entanglement_potential(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    Ok(log_negativity(&split_on_beamsplitter(rho)?, base))
}
