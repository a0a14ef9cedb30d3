use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timedomain::shot::mean_variance;
use crate::timedomain::QuadratureRecord;

/// Fewest records per bin accepted by [`binned_variance`].
pub const MIN_PER_BIN: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseBin {
    pub mean_phase: f64,
    pub variance_snl: f64,
    /// One standard error of the variance, in dB: (10/ln 10)·√(2/N).
    pub error_db: f64,
    pub count: usize,
}

impl PhaseBin {
    /// dB below the shot-noise level (negative when above).
    pub fn db_below_snl(&self) -> f64 {
        crate::fock::db_below_snl(self.variance_snl)
    }
}

/// Standard error in dB of a variance estimated from `n` Gaussian samples.
pub fn variance_error_db(n: usize) -> f64 {
    10.0 / LN_10 * (2.0 / n as f64).sqrt()
}

/// Sorts by phase and splits into `n_bins` equal-count bins; leftover
/// records go to the leading bins one each.
pub fn binned_variance(records: &[QuadratureRecord], n_bins: usize) -> Result<Vec<PhaseBin>> {
    if n_bins == 0 {
        return Err(Error::InvalidParameter("n_bins must be positive".into()));
    }
    let need = n_bins * MIN_PER_BIN;
    if records.len() < need {
        return Err(Error::InsufficientSamples { got: records.len(), need });
    }
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.phase.total_cmp(&b.phase));
    let base = sorted.len() / n_bins;
    let extra = sorted.len() % n_bins;
    let mut out = Vec::with_capacity(n_bins);
    let mut start = 0;
    for b in 0..n_bins {
        let len = base + usize::from(b < extra);
        let bin = &sorted[start..start + len];
        start += len;
        let values: Vec<f64> = bin.iter().map(|r| r.value).collect();
        let (_, variance_snl) = mean_variance(&values);
        out.push(PhaseBin {
            mean_phase: bin.iter().map(|r| r.phase).sum::<f64>() / len as f64,
            variance_snl,
            error_db: variance_error_db(len),
            count: len,
        });
    }
    Ok(out)
}
