use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::quadrature::DEGENERATE_CONTRAST;
use crate::fock::{min_max_variance, DensityMatrix};

/// Squeezing-axis angle mod π.
pub fn extract_phase(rho: &DensityMatrix) -> Result<f64> {
    extract_phase_resolved(rho, DEGENERATE_CONTRAST / 3.0)
}

/// As [`extract_phase`], refusing states whose variance contrast is within
/// three times `resolution` (SNL) of zero.
pub fn extract_phase_resolved(rho: &DensityMatrix, resolution: f64) -> Result<f64> {
    let ext = min_max_variance(rho);
    let contrast = ext.vmax - ext.vmin;
    if ext.degenerate || contrast <= 3.0 * resolution {
        return Err(Error::DegeneratePhase { contrast });
    }
    Ok(ext.theta_min.rem_euclid(PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    /// Two-photon detuning (MHz) or storage time (μs).
    pub control: f64,
    pub phase_mod_pi: f64,
    pub unwrapped: f64,
}

impl PhasePoint {
    pub fn new(control: f64, phase: f64) -> Self {
        let p = phase.rem_euclid(PI);
        Self { control, phase_mod_pi: p, unwrapped: p }
    }
}

/// Which quantity is swept; the other one is held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Detuning swept at fixed storage time (μs).
    DetuningSweep { tau_storage: f64 },
    /// Storage time swept at fixed detuning (MHz).
    TimeSweep { delta_2photon: f64 },
}

impl SweepMode {
    /// dφ/d(control) of φ = 2π·Δ·τ.
    pub fn expected_slope(&self) -> f64 {
        match *self {
            SweepMode::DetuningSweep { tau_storage } => TAU * tau_storage,
            SweepMode::TimeSweep { delta_2photon } => TAU * delta_2photon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnwrapFit {
    pub points: Vec<PhasePoint>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    /// Model steps between neighbours exceed π/2 and some residual exceeds
    /// π/4: the branch choice may be wrong.
    pub ambiguous: bool,
}

/// Lifts mod-π phases onto the line predicted by the sweep mode, then fits
/// slope and intercept by least squares.
///
/// The model line has the expected slope; its offset is the circular mean
/// of the doubled residual angles, so the branch choice does not depend on
/// the unknown phase of the input state.
pub fn unwrap_to_line(points: &[PhasePoint], mode: SweepMode) -> Result<UnwrapFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("{} points given, at least 3 required", points.len())));
    }
    let increasing = points.windows(2).all(|w| w[1].control > w[0].control);
    let decreasing = points.windows(2).all(|w| w[1].control < w[0].control);
    if !(increasing || decreasing) {
        return Err(Error::Fit("control values must be strictly monotone".into()));
    }
    let slope0 = mode.expected_slope();
    let (s, c) = points.iter().fold((0.0, 0.0), |(s, c), p| {
        let a = 2.0 * (p.phase_mod_pi - slope0 * p.control);
        (s + a.sin(), c + a.cos())
    });
    let offset = 0.5 * s.atan2(c);
    let model = |x: f64| slope0 * x + offset;
    let lifted: Vec<PhasePoint> = points
        .iter()
        .map(|p| {
            let k = ((model(p.control) - p.phase_mod_pi) / PI).round();
            PhasePoint { unwrapped: p.phase_mod_pi + k * PI, ..*p }
        })
        .collect();
    let n = lifted.len() as f64;
    let mx = lifted.iter().map(|p| p.control).sum::<f64>() / n;
    let my = lifted.iter().map(|p| p.unwrapped).sum::<f64>() / n;
    let sxx: f64 = lifted.iter().map(|p| (p.control - mx).powi(2)).sum();
    let sxy: f64 = lifted.iter().map(|p| (p.control - mx) * (p.unwrapped - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = lifted.iter().map(|p| p.unwrapped - (slope * p.control + intercept)).collect();
    let big_steps = lifted.windows(2).any(|w| (slope0 * (w[1].control - w[0].control)).abs() > PI / 2.0);
    let big_residual = residuals.iter().any(|r| r.abs() > PI / 4.0);
    Ok(UnwrapFit { points: lifted, slope, intercept, residuals, ambiguous: big_steps && big_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fit_squeezed_thermal, make_squeezed_thermal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn phase_of_rotated_input() {
        let p = fit_squeezed_thermal(0.65, 3.45, 0.3).unwrap();
        let rho = make_squeezed_thermal(&p, 20).unwrap();
        assert!((extract_phase(&rho).unwrap() - 0.3).abs() < 0.01);
        let stored = rho.rotated(TAU * 0.54);
        assert!((extract_phase(&stored).unwrap() - 0.5513274).abs() < 0.02);
        assert!(matches!(extract_phase(&DensityMatrix::vacuum(5)), Err(Error::DegeneratePhase { .. })));
    }

    fn sweep(controls: &[f64], slope: f64, offset: f64, noise: f64, rng: &mut ChaCha8Rng) -> Vec<PhasePoint> {
        let n = Normal::new(0.0, noise.max(1e-300)).unwrap();
        controls
            .iter()
            .map(|&c| {
                let e = if noise > 0.0 { n.sample(rng) } else { 0.0 };
                PhasePoint::new(c, slope * c + offset + e)
            })
            .collect()
    }

    #[test]
    fn noiseless_detuning_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let controls: Vec<f64> = (1..=6).map(|k| 0.1 * k as f64).collect();
        let pts = sweep(&controls, TAU, 0.3, 0.0, &mut rng);
        let fit = unwrap_to_line(&pts, SweepMode::DetuningSweep { tau_storage: 1.0 }).unwrap();
        assert!((fit.slope - TAU).abs() < 1e-9);
        assert!(!fit.ambiguous);
        for p in &fit.points {
            assert!(((p.unwrapped - p.phase_mod_pi) / PI).fract().abs() < 1e-9);
        }
    }

    #[test]
    fn noisy_time_sweep_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let slope = TAU * 0.384;
        let controls: Vec<f64> = (0..6).map(|k| 0.5 + 0.5 * k as f64).collect();
        let mut sq = 0.0;
        for trial in 0..100 {
            let pts = sweep(&controls, slope, 0.1 * trial as f64, 0.05, &mut rng);
            let fit = unwrap_to_line(&pts, SweepMode::TimeSweep { delta_2photon: 0.384 }).unwrap();
            sq += ((fit.slope - slope) / slope).powi(2);
        }
        let rms = (sq / 100.0).sqrt();
        assert!(rms < 0.03, "{rms}");
    }

    #[test]
    fn needs_three_monotone_points() {
        let mode = SweepMode::TimeSweep { delta_2photon: 0.384 };
        assert!(matches!(unwrap_to_line(&[PhasePoint::new(1.0, 0.2)], mode), Err(Error::Fit(_))));
        let pts = [PhasePoint::new(1.0, 0.2), PhasePoint::new(0.5, 0.2), PhasePoint::new(2.0, 0.2)];
        assert!(unwrap_to_line(&pts, mode).is_err());
    }
}
