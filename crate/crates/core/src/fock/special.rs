//! Special functions used by the Fock-basis numerics.

use nalgebra::{DMatrix, SymmetricEigen};

/// Harmonic-oscillator eigenfunctions ψ₀(x) … ψ_{len-1}(x) for the convention
/// where the vacuum has position variance 1/2.
///
/// Uses the normalized three-term recurrence
/// ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}, so no factorials appear.
pub fn hermite_functions_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

pub fn hermite_functions(x: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    hermite_functions_into(x, &mut out);
    out
}

/// Table `t[k][n] = L_n^{(k)}(z)` for `0 <= n < n_max`, `0 <= k < k_max`.
pub fn laguerre_table(z: f64, n_max: usize, k_max: usize) -> Vec<Vec<f64>> {
    (0..k_max)
        .map(|k| {
            let kf = k as f64;
            let mut row = vec![0.0; n_max];
            if n_max > 0 {
                row[0] = 1.0;
            }
            if n_max > 1 {
                row[1] = 1.0 + kf - z;
            }
            for n in 1..n_max.saturating_sub(1) {
                let nf = n as f64;
                row[n + 1] = ((2.0 * nf + 1.0 + kf - z) * row[n] - (nf + kf) * row[n - 1]) / (nf + 1.0);
            }
            row
        })
        .collect()
}

/// √(n!/m!) for n <= m, as a running product.
pub fn sqrt_factorial_ratio(n: usize, m: usize) -> f64 {
    debug_assert!(n <= m);
    ((n + 1)..=m).fold(1.0, |acc, j| acc / (j as f64).sqrt())
}

/// Gauss–Hermite nodes and weights for ∫ e^{−t²} f(t) dt (Golub–Welsch).
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mu0 = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> =
        (0..order).map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let dx = 0.005;
        let len = 41;
        let mut gram = vec![vec![0.0; len]; len];
        let mut x = -12.0;
        while x <= 12.0 {
            let psi = hermite_functions(x, len);
            for m in 0..len {
                for n in 0..len {
                    gram[m][n] += psi[m] * psi[n] * dx;
                }
            }
            x += dx;
        }
        for m in 0..len {
            for n in 0..len {
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((gram[m][n] - expect).abs() < 1e-9, "({m},{n}) = {}", gram[m][n]);
            }
        }
    }

    #[test]
    fn vacuum_wavefunction_at_origin() {
        let psi = hermite_functions(0.0, 3);
        assert_relative_eq!(psi[0] * psi[0], 1.0 / PI.sqrt(), epsilon = 1e-15);
        assert_eq!(psi[1], 0.0);
    }

    #[test]
    fn laguerre_matches_explicit_low_orders() {
        let z = 1.7;
        let t = laguerre_table(z, 4, 3);
        // L_2^{(k)}(z) = (z^2 - 2(k+2) z + (k+1)(k+2)) / 2
        for k in 0..3 {
            let kf = k as f64;
            let l2 = (z * z - 2.0 * (kf + 2.0) * z + (kf + 1.0) * (kf + 2.0)) / 2.0;
            assert_relative_eq!(t[k][2], l2, epsilon = 1e-13);
        }
    }

    #[test]
    fn gauss_hermite_integrates_moments() {
        let (t, w) = gauss_hermite(40);
        let m0: f64 = w.iter().sum();
        let m2: f64 = t.iter().zip(&w).map(|(t, w)| w * t * t).sum();
        let m4: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(4)).sum();
        assert_relative_eq!(m0, PI.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(m2, PI.sqrt() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(m4, 3.0 * PI.sqrt() / 4.0, epsilon = 1e-12);
    }
}
