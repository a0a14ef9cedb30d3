use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::state::DensityMatrix;

/// Hermitian square root of a PSD matrix; negative round-off eigenvalues are clamped.
pub fn psd_sqrt(mat: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(mat.clone());
    let vecs = &eig.eigenvectors;
    let roots = eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, j)] * roots[j]);
    scaled * vecs.adjoint()
}

/// Uhlmann fidelity F = (Tr √(√ρ₁ ρ₂ √ρ₁))².
///
/// Evaluated as the squared trace norm of √ρ₁ √ρ₂, whose singular values are
/// the same in either argument order.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { left: rho1.dim(), right: rho2.dim() });
    }
    let product = psd_sqrt(rho1.matrix()) * psd_sqrt(rho2.matrix());
    let nuclear: f64 = product.singular_values().iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::gaussian::GaussianStateOracle;
    use crate::fock::squeezed::{fit_squeezed_thermal, make_squeezed_thermal};
    use approx::assert_relative_eq;

    #[test]
    fn self_fidelity_is_one() {
        let rho = make_squeezed_thermal(&fit_squeezed_thermal(0.65, 3.45, 0.0).unwrap(), 20).unwrap();
        assert_relative_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn orthogonal_fock_states_have_zero_fidelity() {
        let f = fidelity(&DensityMatrix::fock(1, 5), &DensityMatrix::fock(2, 5)).unwrap();
        assert!(f.abs() < 1e-15);
    }

    #[test]
    fn pure_state_fidelity_is_overlap() {
        let a = DensityMatrix::coherent(C64::new(0.5, 0.0), 20).unwrap();
        let b = DensityMatrix::coherent(C64::new(0.0, 0.4), 20).unwrap();
        assert_relative_eq!(fidelity(&a, &b).unwrap(), (-(0.25f64 + 0.16)).exp(), epsilon = 1e-7);
    }

    #[test]
    fn matches_gaussian_oracle_and_is_symmetric() {
        let pin = fit_squeezed_thermal(0.65, 3.45, 0.0).unwrap();
        let pout = fit_squeezed_thermal(0.95, 1.36, 0.0).unwrap();
        let a = make_squeezed_thermal(&pin, 20).unwrap();
        let b = make_squeezed_thermal(&pout, 20).unwrap();
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        assert!((fab - fba).abs() < 1e-9);
        let oracle =
            GaussianStateOracle::squeezed_thermal(&pin).fidelity(&GaussianStateOracle::squeezed_thermal(&pout));
        assert!((fab - oracle).abs() < 1e-5, "{fab} vs {oracle}");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            fidelity(&DensityMatrix::vacuum(3), &DensityMatrix::vacuum(4)),
            Err(Error::DimensionMismatch { left: 3, right: 4 })
        ));
    }
}
