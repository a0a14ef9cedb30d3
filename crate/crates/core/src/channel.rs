//! Phenomenological memory channel.
//!
//! Storage is modelled as a frequency-independent beamsplitter loss whose
//! environment port carries the control-field Raman noise, preceded by the
//! phase rotation φ = 2π·Δ·τ accumulated from the two-photon detuning Δ over
//! the storage time τ. The efficiency is pinned at the reference storage time
//! and decays exponentially with the memory lifetime:
//!
//! ```text
//! η(τ) = η_ref · exp(−(τ − τ_ref) / τ_mem),   τ_ref = 1 μs
//! ```

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::gaussian::GaussianStateOracle;
use crate::fock::{thermal_loss, DensityMatrix};

/// Storage time at which `eta_ref` was measured, μs.
pub const REFERENCE_STORAGE_US: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryChannelParams {
    /// Efficiency at the reference storage time.
    pub eta_ref: f64,
    /// Memory lifetime, μs.
    #[serde(rename = "tau_mem_us")]
    pub tau_mem: f64,
    /// Excess noise floor with the control field on, dB above the SNL.
    pub raman_db: f64,
    /// Two-photon detuning, MHz.
    #[serde(rename = "delta_2photon_mhz")]
    pub delta_2photon: f64,
    /// Storage time, μs.
    #[serde(rename = "tau_storage_us")]
    pub tau_storage: f64,
}

impl Default for MemoryChannelParams {
    fn default() -> Self {
        Self { eta_ref: 0.15, tau_mem: 1.3, raman_db: 0.1, delta_2photon: 0.54, tau_storage: 1.0 }
    }
}

impl MemoryChannelParams {
    /// A channel that does nothing: unit efficiency, no noise, no detuning.
    pub fn identity() -> Self {
        Self { eta_ref: 1.0, tau_mem: 1.0, raman_db: 0.0, delta_2photon: 0.0, tau_storage: REFERENCE_STORAGE_US }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_mem > 0.0 && self.tau_mem.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau_mem_us = {} must be > 0", self.tau_mem)));
        }
        if !(self.raman_db >= 0.0 && self.raman_db.is_finite()) {
            return Err(Error::InvalidParameter(format!("raman_db = {} must be >= 0", self.raman_db)));
        }
        if !(self.tau_storage >= 0.0 && self.tau_storage.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau_storage_us = {} must be >= 0", self.tau_storage)));
        }
        if !self.delta_2photon.is_finite() {
            return Err(Error::InvalidParameter("delta_2photon_mhz must be finite".into()));
        }
        if !(self.eta_ref >= 0.0 && self.eta_ref.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta_ref = {} must be >= 0", self.eta_ref)));
        }
        if self.efficiency_at(self.tau_storage) > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "eta_ref = {} with tau_mem_us = {} gives efficiency above 1 at tau_storage_us = {}",
                self.eta_ref, self.tau_mem, self.tau_storage
            )));
        }
        Ok(())
    }

    pub fn efficiency_at(&self, tau_storage: f64) -> f64 {
        self.eta_ref * (-(tau_storage - REFERENCE_STORAGE_US) / self.tau_mem).exp()
    }

    /// η at the configured storage time.
    pub fn efficiency(&self) -> f64 {
        self.efficiency_at(self.tau_storage).min(1.0)
    }

    /// Environment variance 10^{raman_db/10} in SNL units.
    pub fn raman_variance_snl(&self) -> f64 {
        10f64.powf(self.raman_db / 10.0)
    }
}

/// Storage phase shift, both raw and reduced mod π.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseShift {
    pub raw: f64,
    pub mod_pi: f64,
}

/// φ = 2π·Δ_2photon·τ_storage (MHz·μs gives cycles).
pub fn phase_shift(params: &MemoryChannelParams) -> PhaseShift {
    let raw = TAU * params.delta_2photon * params.tau_storage;
    PhaseShift { raw, mod_pi: raw.rem_euclid(PI) }
}

/// Beamsplitter loss against a phase-symmetric thermal environment of
/// variance `env_vnoise_snl` (SNL units, >= 1).
pub fn loss_channel(rho: &DensityMatrix, eta: f64, env_vnoise_snl: f64) -> Result<DensityMatrix> {
    if !(env_vnoise_snl >= 1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!("environment variance {env_vnoise_snl} below vacuum")));
    }
    let env_nbar = ((env_vnoise_snl - 1.0) / 2.0).max(0.0);
    thermal_loss(rho, eta, env_nbar)
}

/// Phase rotation by [`phase_shift`], then [`loss_channel`] at η(τ) against
/// the Raman-noise environment.
pub fn memory_channel(rho: &DensityMatrix, params: &MemoryChannelParams) -> Result<DensityMatrix> {
    params.validate()?;
    let rotated = rho.rotated(phase_shift(params).raw);
    loss_channel(&rotated, params.efficiency(), params.raman_variance_snl())
}

/// Gaussian covariance propagation through the same channel.
pub fn memory_channel_oracle(state: &GaussianStateOracle, params: &MemoryChannelParams) -> GaussianStateOracle {
    state.rotated(phase_shift(params).raw).after_loss(params.efficiency(), params.raman_variance_snl())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fit_squeezed_thermal, make_squeezed_thermal, min_max_variance, QuadratureMoments};
    use approx::assert_relative_eq;

    fn input_fit() -> (crate::fock::SqueezedThermalParams, DensityMatrix) {
        let p = fit_squeezed_thermal(0.65, 3.45, 0.0).unwrap();
        (p, make_squeezed_thermal(&p, 20).unwrap())
    }

    #[test]
    fn phase_shift_values() {
        let mut p = MemoryChannelParams::default();
        assert_relative_eq!(phase_shift(&p).raw, 3.392920065876977, epsilon = 1e-12);
        p.delta_2photon = 0.384;
        assert_relative_eq!(phase_shift(&p).raw, 2.412743157956961, epsilon = 1e-12);
        p.delta_2photon = 0.0;
        p.tau_storage = 2.7;
        assert_eq!(phase_shift(&p).raw, 0.0);
    }

    #[test]
    fn loss_channel_extremes() {
        let (_, rho) = input_fit();
        let same = loss_channel(&rho, 1.0, 1.3).unwrap();
        assert!((same.matrix() - rho.matrix()).norm() < 1e-12);
        let env = loss_channel(&rho, 0.0, 1.3).unwrap();
        assert!((env.matrix() - DensityMatrix::thermal(0.15, 20).unwrap().matrix()).norm() < 1e-12);
    }

    #[test]
    fn loss_channel_reference_propagation() {
        let (_, rho) = input_fit();
        let out = loss_channel(&rho, 0.15, 1.02329).unwrap();
        let ext = min_max_variance(&out);
        assert_relative_eq!(ext.vmin, 0.96730, epsilon = 5e-4);
        assert_relative_eq!(ext.vmax, 1.38730, epsilon = 5e-4);
    }

    #[test]
    fn identity_parameters_leave_state_unchanged() {
        let (_, rho) = input_fit();
        let out = memory_channel(&rho, &MemoryChannelParams::identity()).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn default_channel_on_input_fit() {
        let (p, rho) = input_fit();
        let params = MemoryChannelParams::default();
        let out = memory_channel(&rho, &params).unwrap();
        out.validate().unwrap();
        let ext = min_max_variance(&out);
        assert_relative_eq!(ext.vmin, 0.967, epsilon = 1e-3);
        assert_relative_eq!(ext.vmax, 1.387, epsilon = 1e-3);
        // Within 0.1 dB of the measured retrieved levels 0.95 / 1.36.
        assert!((ext.squeezing_db() - (-10.0 * 0.95f64.log10())).abs() < 0.1);
        assert!((ext.antisqueezing_db() - 10.0 * 1.36f64.log10()).abs() < 0.1);

        let oracle = memory_channel_oracle(&GaussianStateOracle::squeezed_thermal(&p), &params);
        let cov = QuadratureMoments::of(&out).cov;
        assert!((cov - oracle.cov).abs().max() < 1e-4);
        assert_relative_eq!(ext.theta_min, phase_shift(&params).mod_pi, epsilon = 1e-6);
    }

    #[test]
    fn stored_vacuum_picks_up_raman_floor() {
        let out = memory_channel(&DensityMatrix::vacuum(20), &MemoryChannelParams::default()).unwrap();
        let ext = min_max_variance(&out);
        assert!(ext.degenerate || ext.vmax - ext.vmin < 1e-9);
        assert_relative_eq!(ext.vmin, 10f64.powf(0.01) * 0.85 + 0.15, epsilon = 1e-9);
        // The environment only fills the lost fraction: 0.85·1.0233 + 0.15 ≈ 1.0198,
        // inside the ±0.01 band around the full 0.1 dB floor.
        assert_relative_eq!(ext.vmin, 1.0198, epsilon = 1e-4);
        assert!((ext.vmin - 1.0233).abs() < 0.01);
    }

    #[test]
    fn efficiency_validation() {
        let bad = MemoryChannelParams { eta_ref: 0.8, tau_mem: 0.5, tau_storage: 0.2, ..Default::default() };
        assert!(bad.validate().is_err());
        let neg = MemoryChannelParams { raman_db: -0.1, ..Default::default() };
        assert!(neg.validate().is_err());
        assert!(MemoryChannelParams::default().validate().is_ok());
    }

    #[test]
    fn json_keys_match_run_config() {
        let json = serde_json::to_value(MemoryChannelParams::default()).unwrap();
        let mut keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["delta_2photon_mhz", "eta_ref", "raman_db", "tau_mem_us", "tau_storage_us"]);
    }
}
