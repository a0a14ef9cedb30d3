use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::MemoryChannelParams;
use crate::error::{Error, Result};
use crate::fock::{fit_from_db, LogBase, SqueezedThermalParams};
use crate::timedomain::TimingConfig;
use crate::tomography::ReconstructionOptions;

/// Input state at the memory, given by its measured levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
    /// LO phase of the squeezed quadrature.
    pub phase_rad: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self { squeezing_db: 1.86, antisqueezing_db: 5.38, phase_rad: 0.0 }
    }
}

impl SourceConfig {
    pub fn params(&self) -> Result<SqueezedThermalParams> {
        fit_from_db(self.squeezing_db, self.antisqueezing_db, self.phase_rad)
    }
}

/// Knobs of the analysis stages that are not part of any single module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub bootstrap_resamples: usize,
    pub variance_bins: usize,
    /// Relative noise on the sideband variance signal used for LO locking.
    pub sideband_noise: f64,
    pub log_base: LogBase,
    /// Shots per point in sweeps.
    pub sweep_shots: usize,
    /// Gaussian noise (rad) added to each extracted sweep phase.
    pub sweep_phase_noise_rad: f64,
    /// Half-width of the square Wigner grid, absolute units.
    pub wigner_extent: f64,
    pub wigner_points: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            bootstrap_resamples: 20,
            variance_bins: 5,
            sideband_noise: 0.01,
            log_base: LogBase::Two,
            sweep_shots: 20_000,
            sweep_phase_noise_rad: 0.0,
            wigner_extent: 4.0,
            wigner_points: 81,
        }
    }
}

/// Complete description of a run; one JSON document, unknown keys rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub source: SourceConfig,
    pub channel: MemoryChannelParams,
    pub timing: TimingConfig,
    pub tomography: ReconstructionOptions,
    pub analysis: AnalysisConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: SourceConfig::default(),
            channel: MemoryChannelParams::default(),
            timing: TimingConfig::default(),
            tomography: ReconstructionOptions::default(),
            analysis: AnalysisConfig::default(),
            seed: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.source.params()?;
        self.channel.validate()?;
        self.timing.validate()?;
        self.tomography.validate()?;
        if (self.timing.storage_duration - self.channel.tau_storage).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "timing.storage_duration = {} differs from channel.tau_storage_us = {}",
                self.timing.storage_duration, self.channel.tau_storage
            )));
        }
        let a = &self.analysis;
        if a.variance_bins == 0 || a.wigner_points < 2 || !(a.wigner_extent > 0.0 && a.wigner_extent <= 8.0) {
            return Err(Error::Config(
                "analysis: bins and grid sizes must be positive, wigner_extent in (0, 8]".into(),
            ));
        }
        if !(a.sideband_noise >= 0.0 && a.sweep_phase_noise_rad >= 0.0) {
            return Err(Error::Config("analysis: noise levels must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Same run with a different storage time in both the channel and the
    /// timing sections.
    pub fn with_storage_time(&self, tau: f64) -> Self {
        let mut out = self.clone();
        out.channel.tau_storage = tau;
        out.timing = self.timing.with_storage_duration(tau);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_json().unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_and_inconsistent_keys_are_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"seed": 3, "colour": "red"}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"source": {"squeezing": 1}}"#), Err(Error::Config(_))));
        let err = RunConfig::from_json(
            r#"{"channel": {"eta_ref": 0.15, "tau_mem_us": 1.3, "raman_db": 0.1,
            "delta_2photon_mhz": 0.54, "tau_storage_us": 2.0}}"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn storage_time_moves_both_sections() {
        let cfg = RunConfig::default().with_storage_time(0.5);
        cfg.validate().unwrap();
        assert_eq!(cfg.timing.storage_duration, 0.5);
    }
}
