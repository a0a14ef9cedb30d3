use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::RngExt;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::timedomain::timing::TimingConfig;

/// Smallest peak-to-peak sideband modulation, SNL, from which a phase is
/// assigned.
pub const MIN_CONTRAST: f64 = 0.05;

/// Symmetric triangle ramp 0 → 2π → 0 over one ramp period, sampled once per
/// shot.
pub fn lo_phase_ramp(shot_index: u64, cfg: &TimingConfig) -> f64 {
    let period = cfg.shots_per_ramp();
    let u = (shot_index as f64 / period).fract();
    TAU * (1.0 - (1.0 - 2.0 * u).abs())
}

/// Slow spectrum-analyser signal from the cw source, one value per shot:
/// V = a − b·cos(2(θ − θ_src)) at the true LO phase θ, with optional
/// multiplicative noise.
pub fn sideband_trace<R: rand::Rng + ?Sized>(
    true_phases: &[f64],
    vmin: f64,
    vmax: f64,
    source_phase: f64,
    rel_noise: f64,
    rng: &mut R,
) -> Vec<f64> {
    let (a, b) = ((vmax + vmin) / 2.0, (vmax - vmin) / 2.0);
    true_phases
        .iter()
        .map(|&th| {
            let v = a - b * (2.0 * (th - source_phase)).cos();
            let z: f64 = rng.sample(StandardNormal);
            v * (1.0 + rel_noise * z)
        })
        .collect()
}

/// Fitted V(θ) = a − b·cos(2(θ_ramp − θ₀)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandFit {
    pub a: f64,
    pub b: f64,
    /// Ramp value at the variance minimum, mod π.
    pub theta0: f64,
}

/// Linear least squares on (1, cos 2θ, sin 2θ).
pub fn fit_sideband(trace: &[f64], ramp: &[f64]) -> Result<SidebandFit> {
    if trace.len() != ramp.len() || trace.len() < 3 {
        return Err(Error::InsufficientSamples { got: trace.len().min(ramp.len()), need: 3 });
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for (&v, &th) in trace.iter().zip(ramp) {
        let row = Vector3::new(1.0, (2.0 * th).cos(), (2.0 * th).sin());
        ata += row * row.transpose();
        aty += row * v;
    }
    let sol = ata.lu().solve(&aty).ok_or_else(|| Error::Fit("ramp does not span the phase circle".into()))?;
    let (a, c, s) = (sol[0], sol[1], sol[2]);
    // −b cos(2(θ − θ₀)) = −b cos 2θ₀ · cos 2θ − b sin 2θ₀ · sin 2θ.
    let b = c.hypot(s);
    let theta0 = (0.5 * (-s).atan2(-c)).rem_euclid(PI);
    Ok(SidebandFit { a, b, theta0 })
}

/// Per-shot LO phases mod π referenced to the source squeezing axis:
/// θ = θ_ramp − θ₀ + `reference_phase`.
pub fn estimate_lo_phase(trace: &[f64], cfg: &TimingConfig, reference_phase: f64) -> Result<Vec<f64>> {
    let ramp: Vec<f64> = (0..trace.len() as u64).map(|k| lo_phase_ramp(k, cfg)).collect();
    let fit = fit_sideband(trace, &ramp)?;
    if 2.0 * fit.b < MIN_CONTRAST {
        return Err(Error::LowContrast { contrast: 2.0 * fit.b, threshold: MIN_CONTRAST });
    }
    Ok(ramp.iter().map(|r| (r - fit.theta0 + reference_phase).rem_euclid(PI)).collect())
}

/// Distance between two angles mod π.
pub fn phase_distance_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}
