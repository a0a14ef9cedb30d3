use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timedomain::timing::TimingConfig;

/// Classical intensities on the acquisition grid, normalised so the input
/// peak is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalWaveforms {
    pub times: Vec<f64>,
    pub input: Vec<f64>,
    /// Leaked front of the pulse before the control field is switched off.
    pub front: Vec<f64>,
    /// Retrieval transient after the control field is switched back on.
    pub retrieval: Vec<f64>,
}

impl ClassicalWaveforms {
    /// Front plus retrieval: the trace seen with storage.
    pub fn stored(&self) -> Vec<f64> {
        self.front.iter().zip(&self.retrieval).map(|(a, b)| a + b).collect()
    }
}

/// Raised-cosine input pulse I(t) = cos²(π(t − t₀)/(2w)) on |t − t₀| ≤ w,
/// whose FWHM is w.
pub fn raised_cosine(t: f64, center: f64, fwhm: f64) -> f64 {
    let u = (t - center) / fwhm;
    if u.abs() <= 1.0 {
        (0.5 * PI * u).cos().powi(2)
    } else {
        0.0
    }
}

/// Input and stored/retrieved intensities. The retrieval transient decays
/// exponentially and carries a fraction `eta` of the input energy.
pub fn classical_waveforms(cfg: &TimingConfig, eta: f64) -> Result<ClassicalWaveforms> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Config(format!("efficiency {eta} outside [0, 1]")));
    }
    let times = cfg.times();
    let input: Vec<f64> = times.iter().map(|&t| raised_cosine(t, cfg.pulse_center, cfg.pulse_fwhm)).collect();
    if cfg.storage_duration == 0.0 {
        let front = vec![0.0; input.len()];
        let retrieval = input.iter().map(|v| eta * v).collect();
        return Ok(ClassicalWaveforms { times, input, front, retrieval });
    }
    let front: Vec<f64> =
        times.iter().zip(&input).map(|(&t, &v)| if t < cfg.control_off_time { v } else { 0.0 }).collect();
    let (t_on, t_end) = cfg.retrieval_mode_window();
    let shape: Vec<f64> = times
        .iter()
        .map(|&t| if t >= t_on && t < t_end { (-(t - t_on) / cfg.retrieval_decay).exp() } else { 0.0 })
        .collect();
    let e_in: f64 = input.iter().sum();
    let e_shape: f64 = shape.iter().sum();
    let scale = if e_shape > 0.0 { eta * e_in / e_shape } else { 0.0 };
    let retrieval = shape.iter().map(|v| v * scale).collect();
    Ok(ClassicalWaveforms { times, input, front, retrieval })
}

/// Unit-norm temporal mode, Σ f_k² dt = 1, living on samples
/// `offset..offset + samples.len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalMode {
    pub dt: f64,
    pub offset: usize,
    pub samples: Vec<f64>,
}

impl TemporalMode {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.samples.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|f| f * f).sum::<f64>() * self.dt
    }

    /// Constant mode over a sample range.
    pub fn flat(dt: f64, range: std::ops::Range<usize>) -> Result<Self> {
        let n = range.len();
        if n == 0 {
            return Err(Error::ZeroEnergy);
        }
        Ok(Self { dt, offset: range.start, samples: vec![1.0 / (n as f64 * dt).sqrt(); n] })
    }
}

/// f_k = √I_k on the samples of `window`, normalised.
pub fn temporal_mode(intensity: &[f64], dt: f64, window: std::ops::Range<usize>) -> Result<TemporalMode> {
    if window.end > intensity.len() {
        return Err(Error::WindowMismatch(format!("window {window:?} exceeds {} intensity samples", intensity.len())));
    }
    let slice = &intensity[window.clone()];
    if let Some(bad) = slice.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("intensity {bad} is not a nonnegative number")));
    }
    let energy: f64 = slice.iter().sum::<f64>() * dt;
    if energy <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let norm = energy.sqrt();
    Ok(TemporalMode { dt, offset: window.start, samples: slice.iter().map(|v| v.sqrt() / norm).collect() })
}

/// Mode of the input pulse over its full support.
pub fn input_mode(cfg: &TimingConfig, waves: &ClassicalWaveforms) -> Result<TemporalMode> {
    temporal_mode(&waves.input, cfg.dt(), cfg.index_range(cfg.pulse_support()))
}

/// Mode of the retrieval transient.
pub fn retrieval_mode(cfg: &TimingConfig, waves: &ClassicalWaveforms) -> Result<TemporalMode> {
    if cfg.storage_duration == 0.0 {
        return temporal_mode(&waves.retrieval, cfg.dt(), cfg.index_range(cfg.pulse_support()));
    }
    temporal_mode(&waves.retrieval, cfg.dt(), cfg.index_range(cfg.retrieval_mode_window()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn input_fwhm_within_one_sample() {
        let cfg = TimingConfig::default();
        let w = classical_waveforms(&cfg, 0.15).unwrap();
        // Half-maximum crossings by linear interpolation between samples.
        let cross = |k: usize| {
            let (v0, v1) = (w.input[k] - 0.5, w.input[k + 1] - 0.5);
            w.times[k] + cfg.dt() * v0 / (v0 - v1)
        };
        let up = (0..w.input.len() - 1).find(|&k| w.input[k] < 0.5 && w.input[k + 1] >= 0.5).unwrap();
        let down = (0..w.input.len() - 1).find(|&k| w.input[k] >= 0.5 && w.input[k + 1] < 0.5).unwrap();
        let width = cross(down) - cross(up);
        assert!((width - 0.6).abs() <= cfg.dt(), "{width}");
    }

    #[test]
    fn retrieval_energy_matches_efficiency() {
        let w = classical_waveforms(&TimingConfig::default(), 0.15).unwrap();
        let ratio = w.retrieval.iter().sum::<f64>() / w.input.iter().sum::<f64>();
        assert_relative_eq!(ratio, 0.15, epsilon = 1e-12);
        // Storage gap is dark.
        let cfg = TimingConfig::default();
        let stored = w.stored();
        assert!(cfg.index_range((1.02, 2.02)).all(|k| stored[k] == 0.0));
    }

    #[test]
    fn unit_efficiency_without_storage_is_identity() {
        let cfg = TimingConfig { storage_duration: 0.0, calib_window: (6.0, 7.0), ..Default::default() };
        let w = classical_waveforms(&cfg, 1.0).unwrap();
        assert_eq!(w.stored(), w.input);
    }

    #[test]
    fn constant_intensity_gives_unit_mode() {
        let mode = temporal_mode(&[3.0; 100], 0.01, 0..100).unwrap();
        for f in &mode.samples {
            assert_relative_eq!(*f, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn modes_are_normalised_and_localised() {
        let cfg = TimingConfig::default();
        let w = classical_waveforms(&cfg, 0.15).unwrap();
        let fin = input_mode(&cfg, &w).unwrap();
        assert!((fin.norm_sqr() - 1.0).abs() < 1e-9);
        let fr = retrieval_mode(&cfg, &w).unwrap();
        assert!((fr.norm_sqr() - 1.0).abs() < 1e-9);
        let t0 = fr.offset as f64 * cfg.dt();
        let t1 = (fr.offset + fr.samples.len()) as f64 * cfg.dt();
        assert!(t0 > 2.0 && t1 < 4.0, "({t0}, {t1})");
    }

    #[test]
    fn empty_window_has_zero_energy() {
        assert!(matches!(temporal_mode(&[0.0; 10], 0.1, 0..10), Err(Error::ZeroEnergy)));
        assert!(matches!(temporal_mode(&[1.0; 10], 0.1, 5..20), Err(Error::WindowMismatch(_))));
    }
}
