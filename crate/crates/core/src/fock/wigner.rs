//! Wigner quasi-probability distribution in absolute units, normalized so
//! that ∬ W dx dp = 1 (vacuum: W(0,0) = 1/π).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::quadrature::check_grid;
use crate::fock::special::{laguerre_table, sqrt_factorial_ratio};
use crate::fock::state::DensityMatrix;

/// W(x, p) = Σ_mn ρ_mn W_{|m⟩⟨n|}(x, p) on the product grid; rows follow
/// `x_grid`, columns `p_grid`.
pub fn wigner(rho: &DensityMatrix, x_grid: &[f64], p_grid: &[f64]) -> Result<DMatrix<f64>> {
    check_grid(x_grid)?;
    check_grid(p_grid)?;
    let d = rho.dim();
    // √(n!/m!) for n <= m, hoisted out of the grid loop.
    let ratios = DMatrix::from_fn(d, d, |n, m| if n <= m { sqrt_factorial_ratio(n, m) } else { 0.0 });
    let mut out = DMatrix::zeros(x_grid.len(), p_grid.len());
    for (i, &x) in x_grid.iter().enumerate() {
        for (j, &p) in p_grid.iter().enumerate() {
            out[(i, j)] = wigner_point(rho, &ratios, x, p);
        }
    }
    Ok(out)
}

/// For m >= n:
/// W_{|m⟩⟨n|} = ((−1)ⁿ/π) √(n!/m!) (√2(x − ip))^{m−n} e^{−(x²+p²)} L_n^{(m−n)}(2(x²+p²)),
/// and W_{|n⟩⟨m|} is its complex conjugate.
fn wigner_point(rho: &DensityMatrix, ratios: &DMatrix<f64>, x: f64, p: f64) -> f64 {
    let d = rho.dim();
    let r2 = x * x + p * p;
    let gauss = (-r2).exp() / PI;
    let lag = laguerre_table(2.0 * r2, d, d);
    let base = C64::new(x, -p) * 2f64.sqrt();
    let mut pow = C64::new(1.0, 0.0);
    let mut total = 0.0;
    for k in 0..d {
        for n in 0..(d - k) {
            let m = n + k;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let w = pow * (sign * ratios[(n, m)] * lag[k][n] * gauss);
            let term = rho.get(m, n) * w;
            total += if k == 0 { term.re } else { 2.0 * term.re };
        }
        pow *= base;
    }
    total
}
