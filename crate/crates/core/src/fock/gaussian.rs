//! Closed-form Gaussian-state formulas, used as an independent cross-check of
//! the Fock-basis numerics.
//!
//! Covariances are in absolute units (vacuum = diag(1/2, 1/2)); variances
//! reported in SNL units are twice the absolute value.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector2};

use crate::error::{Error, Result};
use crate::fock::squeezed::SqueezedThermalParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianStateOracle {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl GaussianStateOracle {
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let state = Self { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self { mean: Vector2::zeros(), cov: Matrix2::identity() * 0.5 }
    }

    pub fn thermal(nbar: f64) -> Self {
        Self { mean: Vector2::zeros(), cov: Matrix2::identity() * (nbar + 0.5) }
    }

    /// Coherent state |α⟩ with ⟨x⟩ = √2 Re α, ⟨p⟩ = √2 Im α.
    pub fn coherent(re: f64, im: f64) -> Self {
        Self { mean: Vector2::new(2f64.sqrt() * re, 2f64.sqrt() * im), cov: Matrix2::identity() * 0.5 }
    }

    pub fn squeezed_thermal(params: &SqueezedThermalParams) -> Self {
        let base = params.nbar + 0.5;
        let diag = Matrix2::new(base * (-2.0 * params.r).exp(), 0.0, 0.0, base * (2.0 * params.r).exp());
        Self { mean: Vector2::zeros(), cov: diag }.rotated(params.phase)
    }

    /// Rotates the phase-space distribution by +φ (matches `DensityMatrix::rotated`).
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let rot = Matrix2::new(c, -s, s, c);
        Self { mean: rot * self.mean, cov: rot * self.cov * rot.transpose() }
    }

    /// Additive Gaussian noise of `units` SNL on every quadrature.
    pub fn with_added_noise(&self, units: f64) -> Self {
        Self { mean: self.mean, cov: self.cov + Matrix2::identity() * (units / 2.0) }
    }

    /// Beamsplitter loss of transmissivity `eta` against a thermal environment
    /// of variance `env_snl` (SNL units).
    pub fn after_loss(&self, eta: f64, env_snl: f64) -> Self {
        Self { mean: self.mean * eta.sqrt(), cov: self.cov * eta + Matrix2::identity() * ((1.0 - eta) * env_snl / 2.0) }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.cov;
        if (c[(0, 1)] - c[(1, 0)]).abs() > 1e-12 {
            return Err(Error::Unphysical("covariance not symmetric".into()));
        }
        if c[(0, 0)] <= 0.0 || c.determinant() <= 0.0 {
            return Err(Error::Unphysical("covariance not positive definite".into()));
        }
        if c.determinant() < 0.25 - 1e-12 {
            return Err(Error::Unphysical(format!("det(cov) = {} violates uncertainty bound", c.determinant())));
        }
        Ok(())
    }

    /// Var(x̂_θ) in SNL units.
    pub fn variance_snl(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        2.0 * (self.cov[(0, 0)] * c * c + self.cov[(1, 1)] * s * s + 2.0 * self.cov[(0, 1)] * s * c)
    }

    /// (V_min, V_max) in SNL units.
    pub fn min_max_snl(&self) -> (f64, f64) {
        let (a, b, c) = (self.cov[(0, 0)], self.cov[(0, 1)], self.cov[(1, 1)]);
        let mid = 0.5 * (a + c);
        let half = (0.25 * (a - c).powi(2) + b * b).sqrt();
        (2.0 * (mid - half), 2.0 * (mid + half))
    }

    /// Marginal density of x̂_θ (absolute units).
    pub fn quadrature_pdf(&self, theta: f64, x: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let mu = self.mean[0] * c + self.mean[1] * s;
        let var = self.variance_snl(theta) / 2.0;
        (-(x - mu).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    pub fn wigner(&self, x: f64, p: f64) -> f64 {
        let d = Vector2::new(x, p) - self.mean;
        let inv = self.cov.try_inverse().expect("positive-definite covariance");
        (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp() / (2.0 * PI * self.cov.determinant().sqrt())
    }

    /// Uhlmann fidelity between single-mode Gaussian states.
    pub fn fidelity(&self, other: &Self) -> f64 {
        let sum = self.cov + other.cov;
        let big_delta = sum.determinant();
        let small_delta = 4.0 * (self.cov.determinant() - 0.25) * (other.cov.determinant() - 0.25);
        let small_delta = small_delta.max(0.0);
        let d = self.mean - other.mean;
        let inv = sum.try_inverse().expect("positive-definite covariance");
        let expo = (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp();
        expo / ((big_delta + small_delta).sqrt() - small_delta.sqrt())
    }

    /// Two-mode covariance after a balanced beamsplitter with a vacuum ancilla.
    /// Ordering (x_A, p_A, x_B, p_B).
    pub fn split_covariance(&self) -> Matrix4<f64> {
        let mut joint = Matrix4::zeros();
        joint.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.cov);
        joint.fixed_view_mut::<2, 2>(2, 2).copy_from(&(Matrix2::identity() * 0.5));
        let t = std::f64::consts::FRAC_1_SQRT_2;
        let bs = Matrix4::new(
            t, 0.0, -t, 0.0, //
            0.0, t, 0.0, -t, //
            t, 0.0, t, 0.0, //
            0.0, t, 0.0, t,
        );
        bs * joint * bs.transpose()
    }

    /// Entanglement potential via the smallest partially transposed
    /// symplectic eigenvalue of [`Self::split_covariance`], in nats.
    pub fn entanglement_potential_nats(&self) -> f64 {
        log_negativity_nats(&self.split_covariance())
    }
}

/// Smallest symplectic eigenvalue of the partial transpose of a two-mode
/// covariance (absolute units).
pub fn pt_symplectic_min(cov: &Matrix4<f64>) -> f64 {
    let a = cov.fixed_view::<2, 2>(0, 0).into_owned();
    let b = cov.fixed_view::<2, 2>(2, 2).into_owned();
    let c = cov.fixed_view::<2, 2>(0, 2).into_owned();
    let delta_pt = a.determinant() + b.determinant() - 2.0 * c.determinant();
    let det = cov.determinant();
    let disc = (delta_pt * delta_pt - 4.0 * det).max(0.0);
    ((delta_pt - disc.sqrt()) / 2.0).max(0.0).sqrt()
}

pub fn log_negativity_nats(cov: &Matrix4<f64>) -> f64 {
    (-(2.0 * pt_symplectic_min(cov)).ln()).max(0.0)
}
