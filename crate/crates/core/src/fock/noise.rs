//! Classical additive Gaussian noise: a Gaussian-weighted average of
//! displaced copies of the state.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::special::{gauss_hermite, laguerre_table, sqrt_factorial_ratio};
use crate::fock::state::DensityMatrix;

/// Gauss–Hermite order per phase-space axis.
const QUADRATURE_ORDER: usize = 48;

/// ⟨m|D(α)|n⟩ for m < rows, n < cols.
pub fn displacement_matrix(alpha: C64, rows: usize, cols: usize) -> DMatrix<C64> {
    let z = alpha.norm_sqr();
    let size = rows.max(cols);
    let lag = laguerre_table(z, size, size);
    let env = (-0.5 * z).exp();
    let neg_conj = -alpha.conj();
    DMatrix::from_fn(rows, cols, |m, n| {
        if m >= n {
            alpha.powu((m - n) as u32) * (sqrt_factorial_ratio(n, m) * env * lag[m - n][n])
        } else {
            neg_conj.powu((n - m) as u32) * (sqrt_factorial_ratio(m, n) * env * lag[n - m][m])
        }
    })
}

/// Raises every quadrature variance by `units` SNL (absolute variance +units/2).
/// The output keeps the input cutoff.
pub fn add_vacuum_units(rho: &DensityMatrix, units: f64) -> Result<DensityMatrix> {
    add_vacuum_units_to_dim(rho, units, rho.dim())
}

/// As [`add_vacuum_units`], evaluating the output at cutoff `out_dim`.
pub fn add_vacuum_units_to_dim(rho: &DensityMatrix, units: f64, out_dim: usize) -> Result<DensityMatrix> {
    if !(units >= 0.0 && units.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise units {units} must be >= 0")));
    }
    if units == 0.0 {
        return rho.embed(out_dim);
    }
    // Re α and Im α each ~ N(0, units/4), so x = √2 Re α gains variance units/2.
    let sigma = (units / 4.0).sqrt();
    let (nodes, weights) = gauss_hermite(QUADRATURE_ORDER);
    let norm = std::f64::consts::PI;
    let d = rho.dim();
    let mut acc = DMatrix::<C64>::zeros(out_dim, out_dim);
    for (tx, wx) in nodes.iter().zip(&weights) {
        for (ty, wy) in nodes.iter().zip(&weights) {
            let w = wx * wy / norm;
            if w < 1e-300 {
                continue;
            }
            let alpha = C64::new(2f64.sqrt() * sigma * tx, 2f64.sqrt() * sigma * ty);
            let disp = displacement_matrix(alpha, out_dim, d);
            acc += (&disp * rho.matrix() * disp.adjoint()).scale(w);
        }
    }
    let out = DensityMatrix::from_matrix_unchecked(acc)?;
    out.check_tail()?;
    Ok(out)
}
