//! Quadrature statistics of x̂_θ = (â e^{−iθ} + â† e^{iθ})/√2.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::gaussian::GaussianStateOracle;
use crate::fock::special::hermite_functions_into;
use crate::fock::state::DensityMatrix;

/// Largest |x| (absolute units) accepted by grid-based evaluations.
pub const X_LIMIT: f64 = 8.0;

/// Below this contrast a state is treated as phase-symmetric.
pub const DEGENERATE_CONTRAST: f64 = 1e-9;

/// First and second moments of (x̂, p̂) in absolute units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureMoments {
    pub mean: Vector2<f64>,
    /// Symmetrized covariance matrix.
    pub cov: Matrix2<f64>,
}

impl QuadratureMoments {
    pub fn of(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let mut a1 = C64::new(0.0, 0.0);
        let mut a2 = C64::new(0.0, 0.0);
        let mut n = 0.0;
        for m in 0..d {
            n += m as f64 * rho.get(m, m).re;
            if m + 1 < d {
                a1 += rho.get(m + 1, m) * ((m + 1) as f64).sqrt();
            }
            if m + 2 < d {
                a2 += rho.get(m + 2, m) * (((m + 1) * (m + 2)) as f64).sqrt();
            }
        }
        let mean = Vector2::new(2f64.sqrt() * a1.re, 2f64.sqrt() * a1.im);
        let xx = a2.re + n + 0.5 - mean[0] * mean[0];
        let pp = -a2.re + n + 0.5 - mean[1] * mean[1];
        let xp = a2.im - mean[0] * mean[1];
        Self { mean, cov: Matrix2::new(xx, xp, xp, pp) }
    }

    /// The Gaussian state sharing these moments.
    pub fn gaussian(&self) -> GaussianStateOracle {
        GaussianStateOracle { mean: self.mean, cov: self.cov }
    }
}

/// Var(x̂_θ) in SNL units.
pub fn quad_variance(rho: &DensityMatrix, theta: f64) -> f64 {
    QuadratureMoments::of(rho).gaussian().variance_snl(theta)
}

/// Extremal quadrature variances and the orientation of the minimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceExtrema {
    pub vmin: f64,
    pub vmax: f64,
    /// Angle of minimum variance in [0, π); 0 when `degenerate`.
    pub theta_min: f64,
    /// Set when V_max − V_min < 1e-9.
    pub degenerate: bool,
}

impl VarianceExtrema {
    pub fn squeezing_db(&self) -> f64 {
        -10.0 * self.vmin.log10()
    }

    pub fn antisqueezing_db(&self) -> f64 {
        10.0 * self.vmax.log10()
    }
}

/// Extremizes `quad_variance` over θ via the second-moment matrix.
pub fn min_max_variance(rho: &DensityMatrix) -> VarianceExtrema {
    extrema_from_cov(&QuadratureMoments::of(rho).cov)
}

pub(crate) fn extrema_from_cov(cov: &Matrix2<f64>) -> VarianceExtrema {
    let (a, b, c) = (cov[(0, 0)], cov[(0, 1)], cov[(1, 1)]);
    let mid = a + c;
    let half = (0.25 * (a - c).powi(2) + b * b).sqrt() * 2.0;
    let vmin = mid - half;
    let vmax = mid + half;
    let degenerate = vmax - vmin < DEGENERATE_CONTRAST;
    // Var(θ) = mid + (a − c) cos 2θ + 2b sin 2θ; maximum at atan2(2b, a − c)/2.
    let theta_min = if degenerate { 0.0 } else { (0.5 * (2.0 * b).atan2(a - c) + PI / 2.0).rem_euclid(PI) };
    VarianceExtrema { vmin, vmax, theta_min, degenerate }
}

/// Marginal density pr(x|θ) = Σ ρ_mn ψ_m(x) ψ_n(x) e^{i(n−m)θ} on an
/// absolute-unit grid.
pub fn quadrature_pdf(rho: &DensityMatrix, theta: f64, x_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(x_grid)?;
    let kernel = phase_kernel(rho, theta);
    let d = rho.dim();
    let mut psi = vec![0.0; d];
    Ok(x_grid
        .iter()
        .map(|&x| {
            hermite_functions_into(x, &mut psi);
            quadratic_form(&kernel, &psi)
        })
        .collect())
}

/// Re[ρ_mn e^{i(n−m)θ}], the real symmetric kernel whose quadratic form in
/// ψ(x) is the marginal density at angle θ.
pub(crate) fn phase_kernel(rho: &DensityMatrix, theta: f64) -> DMatrix<f64> {
    let d = rho.dim();
    DMatrix::from_fn(d, d, |m, n| (rho.get(m, n) * C64::from_polar(1.0, (n as f64 - m as f64) * theta)).re)
}

pub(crate) fn quadratic_form(kernel: &DMatrix<f64>, v: &[f64]) -> f64 {
    let d = v.len();
    let mut acc = 0.0;
    for m in 0..d {
        let mut row = 0.0;
        for n in 0..d {
            row += kernel[(m, n)] * v[n];
        }
        acc += v[m] * row;
    }
    acc
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    match grid.iter().find(|x| !(x.abs() <= X_LIMIT)) {
        Some(&value) => Err(Error::OutOfRange { value, limit: X_LIMIT }),
        None => Ok(()),
    }
}
