use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::OnceLock;

use crate::fock::quadrature::{phase_kernel, quadratic_form, X_LIMIT};
use crate::fock::special::hermite_functions_into;
use crate::fock::DensityMatrix;

/// Points of the absolute-unit x grid on [−8, 8].
pub const GRID_POINTS: usize = 4096;
/// Phase nodes across [0, π); spacing just under 0.01 rad.
pub const PHASE_NODES: usize = 315;

/// Inverse-CDF quadrature sampler with lazily built per-phase tables.
///
/// A draw at angle θ picks one of the two neighbouring phase nodes with
/// linear weights, so the sampled distribution is the linear interpolation
/// of the node marginals. pr(x|θ + π) = pr(−x|θ) folds the circle onto
/// [0, π).
pub struct QuadratureSampler {
    rho: DensityMatrix,
    grid: Vec<f64>,
    psi: Vec<f64>,
    cdfs: Vec<OnceLock<Vec<f64>>>,
}

impl QuadratureSampler {
    pub fn new(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let step = 2.0 * X_LIMIT / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| -X_LIMIT + i as f64 * step).collect();
        let mut psi = vec![0.0; GRID_POINTS * d];
        for (i, &x) in grid.iter().enumerate() {
            hermite_functions_into(x, &mut psi[i * d..(i + 1) * d]);
        }
        Self { rho: rho.clone(), grid, psi, cdfs: (0..PHASE_NODES).map(|_| OnceLock::new()).collect() }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    fn cdf(&self, node: usize) -> &[f64] {
        self.cdfs[node].get_or_init(|| {
            let d = self.rho.dim();
            let kernel = phase_kernel(&self.rho, node as f64 * PI / PHASE_NODES as f64);
            let pdf: Vec<f64> =
                (0..GRID_POINTS).map(|i| quadratic_form(&kernel, &self.psi[i * d..(i + 1) * d]).max(0.0)).collect();
            let mut cdf = Vec::with_capacity(GRID_POINTS);
            let mut acc = 0.0;
            cdf.push(0.0);
            for i in 1..GRID_POINTS {
                acc += 0.5 * (pdf[i - 1] + pdf[i]) * (self.grid[i] - self.grid[i - 1]);
                cdf.push(acc);
            }
            cdf.iter_mut().for_each(|c| *c /= acc);
            cdf
        })
    }

    fn invert(&self, node: usize, u: f64) -> f64 {
        let cdf = self.cdf(node);
        let i = cdf.partition_point(|&c| c <= u).clamp(1, GRID_POINTS - 1);
        let (c0, c1) = (cdf[i - 1], cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + t * (self.grid[i] - self.grid[i - 1])
    }

    /// One quadrature value in SNL units at LO phase `theta`, from two
    /// uniforms on [0, 1).
    pub fn sample(&self, theta: f64, u_node: f64, u_x: f64) -> f64 {
        let mut t = theta.rem_euclid(TAU);
        let mut flip = t >= PI;
        if flip {
            t -= PI;
        }
        let pos = t / PI * PHASE_NODES as f64;
        let lower = (pos.floor() as usize).min(PHASE_NODES - 1);
        let mut node = lower + usize::from(u_node < pos - lower as f64);
        if node == PHASE_NODES {
            node = 0;
            flip = !flip;
        }
        let x = self.invert(node, u_x);
        SQRT_2 * if flip { -x } else { x }
    }
}
