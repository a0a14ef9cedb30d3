use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::RngExt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{min_max_variance, DensityMatrix};
use crate::timedomain::shot::{domain, mean_variance, stream_rng};
use crate::timedomain::QuadratureRecord;
use crate::tomography::mle::{iterate, Cells, ReconstructionOptions};

/// Spread of squeezing and antisqueezing over bootstrap reconstructions.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapSummary {
    pub squeezing_db_std: f64,
    pub antisqueezing_db_std: f64,
    /// (squeezing, antisqueezing) in dB per resample.
    pub samples: Vec<(f64, f64)>,
}

/// Nonparametric bootstrap: each resample draws N records with replacement
/// and is reconstructed from `start` (the full-data estimate, if given) or
/// from the maximally mixed state.
pub fn bootstrap_uncertainty(
    records: &[QuadratureRecord],
    opts: &ReconstructionOptions,
    resamples: usize,
    seed: u64,
    start: Option<&DensityMatrix>,
) -> Result<BootstrapSummary> {
    if resamples < 2 {
        return Err(Error::InvalidParameter("bootstrap needs at least 2 resamples".into()));
    }
    let cells = Cells::build(records, opts)?;
    let seed_rho = match start {
        Some(rho) if rho.dim() == opts.dim => rho.matrix().clone(),
        Some(rho) => return Err(Error::DimensionMismatch { left: rho.dim(), right: opts.dim }),
        None => DMatrix::<C64>::identity(opts.dim, opts.dim).scale(1.0 / opts.dim as f64),
    };
    let n = records.len();
    let samples: Vec<(f64, f64)> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, domain::BOOTSTRAP, i as u64);
            let mut weights = vec![0.0; cells.len()];
            for _ in 0..n {
                weights[cells.record_cells()[rng.random_range(0..n)]] += 1.0;
            }
            let res = iterate(&cells.reweighted(weights), seed_rho.clone(), opts)?;
            let ext = min_max_variance(&res.rho);
            Ok((ext.squeezing_db(), ext.antisqueezing_db()))
        })
        .collect::<Result<_>>()?;
    let sq: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let asq: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(BootstrapSummary {
        squeezing_db_std: mean_variance(&sq).1.sqrt(),
        antisqueezing_db_std: mean_variance(&asq).1.sqrt(),
        samples,
    })
}
