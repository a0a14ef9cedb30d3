use rayon::prelude::*;

use crate::error::Result;
use crate::timedomain::sampler::QuadratureSampler;
use crate::timedomain::shot::{project, ShotModel, StreamRegistry, VarianceAccumulator};
use crate::timedomain::waveform::TemporalMode;

/// Shots per work unit. Fixed so that reductions do not depend on the
/// number of workers.
pub const CHUNK_SHOTS: usize = 1024;

/// Raw per-shot projections and pointwise moments from one run.
#[derive(Clone, Debug)]
pub struct Acquisition {
    /// Matched-filter outputs on the signal mode, before calibration.
    pub raw: Vec<f64>,
    /// Projections on the vacuum calibration mode.
    pub calib_raw: Vec<f64>,
    pub trace: VarianceAccumulator,
}

/// Synthesises one shot per entry of `true_phases` on stream
/// (`domain`, shot index) and reduces them in shot order.
pub fn acquire(
    model: &ShotModel,
    sampler: &QuadratureSampler,
    true_phases: &[f64],
    calib_mode: &TemporalMode,
    registry: &StreamRegistry,
    domain: u64,
) -> Result<Acquisition> {
    let n = true_phases.len();
    let chunks: Vec<Acquisition> = (0..n.div_ceil(CHUNK_SHOTS))
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK_SHOTS..((c + 1) * CHUNK_SHOTS).min(n);
            let mut part = Acquisition {
                raw: Vec::with_capacity(range.len()),
                calib_raw: Vec::with_capacity(range.len()),
                trace: VarianceAccumulator::new(model.n_samples()),
            };
            for k in range {
                let mut rng = registry.claim(domain, k as u64)?;
                let shot = model.synthesize(sampler, true_phases[k], &mut rng);
                part.raw.push(project(&shot.samples, &model.mode)?);
                part.calib_raw.push(project(&shot.samples, calib_mode)?);
                part.trace.push(&shot.samples);
            }
            Ok(part)
        })
        .collect::<Result<_>>()?;
    let mut out = Acquisition {
        raw: Vec::with_capacity(n),
        calib_raw: Vec::with_capacity(n),
        trace: VarianceAccumulator::new(model.n_samples()),
    };
    for part in chunks {
        out.raw.extend(part.raw);
        out.calib_raw.extend(part.calib_raw);
        out.trace.merge(&part.trace);
    }
    Ok(out)
}
