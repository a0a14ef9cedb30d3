//! Squeezed thermal states: construction in the Fock basis and the inverse
//! fit from measured quadrature variances.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::state::DensityMatrix;

/// Parameters of R(φ)·S(r)·ρ_th(n̄)·S†(r)·R†(φ).
///
/// In SNL units the extreme quadrature variances are (2n̄+1)e^{∓2r}, with the
/// minimum along `phase`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezedThermalParams {
    pub r: f64,
    pub nbar: f64,
    pub phase: f64,
}

impl SqueezedThermalParams {
    pub fn new(r: f64, nbar: f64, phase: f64) -> Result<Self> {
        let p = Self { r, nbar, phase };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing parameter r = {} must be >= 0", self.r)));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("thermal occupation nbar = {} must be >= 0", self.nbar)));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidParameter("phase must be finite".into()));
        }
        Ok(())
    }

    pub fn vmin_snl(&self) -> f64 {
        (2.0 * self.nbar + 1.0) * (-2.0 * self.r).exp()
    }

    pub fn vmax_snl(&self) -> f64 {
        (2.0 * self.nbar + 1.0) * (2.0 * self.r).exp()
    }

    /// Squeezing below the SNL in dB (negative when V_min > 1).
    pub fn squeezing_db(&self) -> f64 {
        -10.0 * self.vmin_snl().log10()
    }

    pub fn antisqueezing_db(&self) -> f64 {
        10.0 * self.vmax_snl().log10()
    }
}

/// Inverts V_min = (2n̄+1)e^{−2r}, V_max = (2n̄+1)e^{2r}.
pub fn fit_squeezed_thermal(vmin_snl: f64, vmax_snl: f64, phase: f64) -> Result<SqueezedThermalParams> {
    if !(vmin_snl > 0.0 && vmax_snl > 0.0) || !vmin_snl.is_finite() || !vmax_snl.is_finite() {
        return Err(Error::InvalidParameter(format!("variances must be positive, got ({vmin_snl}, {vmax_snl})")));
    }
    if vmin_snl > vmax_snl {
        return Err(Error::InvalidParameter(format!("vmin {vmin_snl} exceeds vmax {vmax_snl}")));
    }
    let product = vmin_snl * vmax_snl;
    if product < 1.0 - 1e-9 {
        return Err(Error::Unphysical(format!("V_min·V_max = {product} < 1")));
    }
    let r = 0.25 * (vmax_snl / vmin_snl).ln();
    let nbar = ((product.max(1.0)).sqrt() - 1.0) / 2.0;
    SqueezedThermalParams::new(r, nbar, phase.rem_euclid(PI))
}

/// Fit from squeezing / antisqueezing levels in dB.
pub fn fit_from_db(squeezing_db: f64, antisqueezing_db: f64, phase: f64) -> Result<SqueezedThermalParams> {
    fit_squeezed_thermal(10f64.powf(-squeezing_db / 10.0), 10f64.powf(antisqueezing_db / 10.0), phase)
}

/// Annihilation operator in a `dim`-level truncation.
pub fn annihilation(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |m, n| if n == m + 1 { C64::new((n as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

/// exp((r/2)(â² − â†²)) in a `dim`-level truncation.
pub fn squeeze_operator(r: f64, dim: usize) -> DMatrix<C64> {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let gen = (&a2 - a2.adjoint()).scale(r / 2.0);
    gen.exp()
}

/// Builds the squeezed thermal state at twice the requested cutoff, then
/// truncates and renormalizes.
pub fn make_squeezed_thermal(params: &SqueezedThermalParams, dim: usize) -> Result<DensityMatrix> {
    params.validate()?;
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("cutoff {dim} must be >= 2")));
    }
    let work = 2 * dim;
    let thermal = DensityMatrix::thermal(params.nbar, work)?;
    let s = squeeze_operator(params.r, work);
    let squeezed = &s * thermal.matrix() * s.adjoint();
    let full = DensityMatrix::from_matrix_unchecked(squeezed)?.rotated(params.phase);
    let rho = full.embed(dim)?;
    rho.check_tail()?;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::quadrature::min_max_variance;
    use approx::assert_relative_eq;

    #[test]
    fn zero_parameters_give_vacuum() {
        let rho = make_squeezed_thermal(&SqueezedThermalParams::new(0.0, 0.0, 0.0).unwrap(), 10).unwrap();
        assert!((rho.matrix() - DensityMatrix::vacuum(10).matrix()).norm() < 1e-14);
    }

    #[test]
    fn fit_inverts_reference_levels() {
        // r = ln(3.45/0.65)/4, nbar = (sqrt(0.65*3.45) - 1)/2
        let p = fit_squeezed_thermal(0.65, 3.45, 0.0).unwrap();
        assert_relative_eq!(p.r, 0.41729, epsilon = 5e-6);
        assert_relative_eq!(p.nbar, 0.24875, epsilon = 5e-6);
        let p = fit_squeezed_thermal(0.95, 1.36, 0.0).unwrap();
        assert_relative_eq!(p.r, 0.0896945, epsilon = 5e-7);
        assert_relative_eq!(p.nbar, 0.0683309, epsilon = 5e-7);
        let p = fit_squeezed_thermal(1.0, 1.0, 0.0).unwrap();
        assert_eq!((p.r, p.nbar), (0.0, 0.0));
    }

    #[test]
    fn fit_rejects_unphysical_and_inverted_inputs() {
        assert!(matches!(fit_squeezed_thermal(0.5, 1.5, 0.0), Err(Error::Unphysical(_))));
        assert!(matches!(fit_squeezed_thermal(2.0, 1.0, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(fit_squeezed_thermal(-1.0, 1.0, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn construction_rejects_negative_parameters() {
        assert!(SqueezedThermalParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(SqueezedThermalParams::new(0.1, -0.1, 0.0).is_err());
    }

    #[test]
    fn cutoff_too_small_is_reported() {
        let p = SqueezedThermalParams::new(1.2, 0.5, 0.0).unwrap();
        assert!(matches!(make_squeezed_thermal(&p, 8), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn round_trip_through_variances() {
        let p = fit_squeezed_thermal(0.65, 3.45, 0.7).unwrap();
        let rho = make_squeezed_thermal(&p, 20).unwrap();
        rho.validate().unwrap();
        let ext = min_max_variance(&rho);
        assert_relative_eq!(ext.vmin, 0.65, max_relative = 1e-3);
        assert_relative_eq!(ext.vmax, 3.45, max_relative = 1e-3);
        assert_relative_eq!(ext.theta_min, 0.7, epsilon = 1e-6);
    }

    #[test]
    fn thermal_special_case_is_diagonal() {
        let rho = make_squeezed_thermal(&SqueezedThermalParams::new(0.0, 1.0, 0.0).unwrap(), 20).unwrap();
        let norm: f64 = (0..20).map(|n| 0.5f64.powi(n + 1)).sum();
        for m in 0..20 {
            for n in 0..20 {
                let expect = if m == n { 0.5f64.powi(m as i32 + 1) / norm } else { 0.0 };
                assert!((rho.get(m, n).re - expect).abs() < 1e-12 && rho.get(m, n).im.abs() < 1e-12);
            }
        }
    }
}
