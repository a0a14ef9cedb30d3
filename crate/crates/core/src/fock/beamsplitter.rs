//! Two-mode beamsplitter built block by block in the total-photon-number
//! subspaces {|k, N−k⟩ : k = 0..N}, where the generator is exact.
//!
//! The convention is U|1,0⟩ = cos θ |1,0⟩ + sin θ |0,1⟩ with transmissivity
//! η = cos² θ for mode A.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::state::{DensityMatrix, TwoModeDensityMatrix};

/// Largest per-mode cutoff accepted by [`split_on_beamsplitter`].
pub const MAX_SPLIT_DIM: usize = 25;

/// Block unitaries U_N for N = 0..n_max, with `blocks[N][(k, k')]` =
/// ⟨k, N−k| U |k', N−k'⟩.
#[derive(Clone, Debug)]
pub struct BeamsplitterBlocks {
    blocks: Vec<DMatrix<f64>>,
}

impl BeamsplitterBlocks {
    pub fn new(eta: f64, n_max: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("transmissivity {eta} outside [0, 1]")));
        }
        let theta = eta.sqrt().acos();
        let blocks = (0..=n_max)
            .map(|n| {
                // G = θ(â b̂† − â† b̂) restricted to the N-photon block.
                let gen = DMatrix::from_fn(n + 1, n + 1, |row, col| {
                    let (k, nf) = (col as f64, n as f64);
                    if row + 1 == col {
                        theta * (k * (nf - k + 1.0)).sqrt()
                    } else if col + 1 == row {
                        -theta * ((k + 1.0) * (nf - k)).sqrt()
                    } else {
                        0.0
                    }
                });
                gen.exp()
            })
            .collect();
        Ok(Self { blocks })
    }

    /// ⟨k, N−k| U |n, N−n⟩.
    pub fn amplitude(&self, total: usize, k: usize, n: usize) -> f64 {
        self.blocks[total][(k, n)]
    }
}

/// U_BS(ρ ⊗ |0⟩⟨0|)U_BS† on a balanced beamsplitter.
pub fn split_on_beamsplitter(rho: &DensityMatrix) -> Result<TwoModeDensityMatrix> {
    let d = rho.dim();
    if d > MAX_SPLIT_DIM {
        return Err(Error::InvalidParameter(format!("cutoff {d} exceeds two-mode limit {MAX_SPLIT_DIM}")));
    }
    let bs = BeamsplitterBlocks::new(0.5, d - 1)?;
    // Column n of `iso` is U|n, 0⟩ expressed in the product basis.
    let mut iso = DMatrix::<C64>::zeros(d * d, d);
    for n in 0..d {
        for k in 0..=n {
            iso[(k * d + (n - k), n)] = C64::new(bs.amplitude(n, k, n), 0.0);
        }
    }
    let out = &iso * rho.matrix() * iso.adjoint();
    Ok(TwoModeDensityMatrix::from_parts(d, out))
}

/// Loss on a transmissivity-`eta` beamsplitter whose second port carries a
/// thermal state with mean occupation `env_nbar`; the environment is traced
/// out. The output keeps the input cutoff.
pub fn thermal_loss(rho: &DensityMatrix, eta: f64, env_nbar: f64) -> Result<DensityMatrix> {
    if !(env_nbar >= 0.0 && env_nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("environment occupation {env_nbar} must be >= 0")));
    }
    let d = rho.dim();
    let env = thermal_weights(env_nbar);
    let j_max = env.len() - 1;
    let bs = BeamsplitterBlocks::new(eta, d - 1 + j_max)?;
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for (j, &pj) in env.iter().enumerate() {
        // l = photons left in the environment: K_{jl}|n⟩ = Σ_k ⟨k, n+j−k|U|n, j⟩ |k⟩, k = n+j−l.
        for l in 0..=(d - 1 + j) {
            let kraus = DMatrix::from_fn(d, d, |k, n| {
                let total = n + j;
                if k + l == total {
                    C64::new(bs.amplitude(total, k, n), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            if kraus.iter().all(|z| z.re == 0.0) {
                continue;
            }
            acc += (&kraus * rho.matrix() * kraus.adjoint()).scale(pj);
        }
    }
    let out = DensityMatrix::from_matrix_unchecked(acc)?;
    out.check_tail()?;
    Ok(out)
}

/// Thermal populations, truncated once the remaining tail is below 1e-16.
fn thermal_weights(nbar: f64) -> Vec<f64> {
    let ratio = nbar / (nbar + 1.0);
    let mut out = vec![1.0 / (nbar + 1.0)];
    let mut tail = 1.0 - out[0];
    while tail > 1e-16 && out.len() < 200 {
        let next = out[out.len() - 1] * ratio;
        out.push(next);
        tail -= next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_splits_to_two_mode_vacuum() {
        let two = split_on_beamsplitter(&DensityMatrix::vacuum(5)).unwrap();
        assert_relative_eq!(two.get((0, 0), (0, 0)).re, 1.0, epsilon = 1e-15);
        assert!((two.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_photon_splits_symmetrically() {
        let two = split_on_beamsplitter(&DensityMatrix::fock(1, 4)).unwrap();
        for a in [(1, 0), (0, 1)] {
            for b in [(1, 0), (0, 1)] {
                assert_relative_eq!(two.get(a, b).re, 0.5, epsilon = 1e-14);
            }
        }
        assert_relative_eq!(two.matrix().norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn energy_is_conserved() {
        let rho = DensityMatrix::coherent(C64::new(1.1, 0.4), 20).unwrap();
        let two = split_on_beamsplitter(&rho).unwrap();
        let n_in = rho.mean_photon_number();
        let n_out = two.reduced_a().unwrap().mean_photon_number() + two.reduced_b().unwrap().mean_photon_number();
        assert!((n_in - n_out).abs() < 1e-9);
        assert!((two.trace() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_splits_into_product_of_coherents() {
        let alpha = C64::new(0.9, -0.3);
        let two = split_on_beamsplitter(&DensityMatrix::coherent(alpha, 24).unwrap()).unwrap();
        let a = DensityMatrix::coherent(alpha / 2f64.sqrt(), 24).unwrap();
        let b = DensityMatrix::coherent(alpha / 2f64.sqrt(), 24).unwrap();
        let expect = TwoModeDensityMatrix::product(&a, &b).unwrap();
        assert!((two.matrix() - expect.matrix()).norm() < 1e-8);
    }

    #[test]
    fn loss_extremes() {
        let rho = DensityMatrix::coherent(C64::new(0.8, 0.2), 16).unwrap();
        let same = thermal_loss(&rho, 1.0, 0.2).unwrap();
        assert!((same.matrix() - rho.matrix()).norm() < 1e-12);
        let env = thermal_loss(&rho, 0.0, 0.2).unwrap();
        assert!((env.matrix() - DensityMatrix::thermal(0.2, 16).unwrap().matrix()).norm() < 1e-12);
    }

    #[test]
    fn pure_loss_on_coherent_state_attenuates_amplitude() {
        let alpha = C64::new(1.2, 0.5);
        let out = thermal_loss(&DensityMatrix::coherent(alpha, 20).unwrap(), 0.3, 0.0).unwrap();
        let expect = DensityMatrix::coherent(alpha * 0.3f64.sqrt(), 20).unwrap();
        assert!((out.matrix() - expect.matrix()).norm() < 1e-8);
    }

    #[test]
    fn invalid_transmissivity() {
        assert!(BeamsplitterBlocks::new(1.5, 3).is_err());
    }
}
