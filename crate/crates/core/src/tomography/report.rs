use serde::{Deserialize, Serialize};

use crate::fock::min_max_variance;
use crate::tomography::bootstrap::BootstrapSummary;
use crate::tomography::mle::ReconstructionResult;

/// Summary written next to a reconstructed density matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionReport {
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
    pub theta_min_rad: f64,
    /// Bootstrap standard deviation of `squeezing_db`.
    pub uncertainty_db: Option<f64>,
    /// Bootstrap standard deviation of `antisqueezing_db`.
    pub antisqueezing_uncertainty_db: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub loglik_final: f64,
}

impl ReconstructionReport {
    pub fn new(result: &ReconstructionResult, bootstrap: Option<&BootstrapSummary>) -> Self {
        let ext = min_max_variance(&result.rho);
        Self {
            squeezing_db: ext.squeezing_db(),
            antisqueezing_db: ext.antisqueezing_db(),
            theta_min_rad: ext.theta_min,
            uncertainty_db: bootstrap.map(|b| b.squeezing_db_std),
            antisqueezing_uncertainty_db: bootstrap.map(|b| b.antisqueezing_db_std),
            iterations: result.iterations,
            converged: result.converged,
            loglik_final: result.loglik_final(),
        }
    }
}
