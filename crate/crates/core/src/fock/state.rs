//! Single- and two-mode density matrices in a truncated Fock basis.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hermiticity tolerance (max |ρ − ρ†|).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;
/// Maximum weight allowed in the top two Fock levels of a constructed state.
pub const TAIL_LIMIT: f64 = 1e-4;
/// Default Fock cutoff.
pub const DEFAULT_DIM: usize = 20;
/// Largest supported single-mode cutoff.
pub const MAX_DIM: usize = 64;

/// Complex Hermitian, unit-trace, positive semidefinite matrix ρ_mn in the
/// Fock basis |0⟩ … |dim−1⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Symmetrizes `(M + M†)/2` and rescales to unit trace without further checks.
    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() || mat.nrows() < 1 {
            return Err(Error::InvalidState(format!(
                "matrix must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = (&mat + mat.adjoint()).scale(0.5);
        let tr = herm.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Ok(Self { mat: herm.unscale(tr) })
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::fock(0, dim)
    }

    /// Number state |n⟩⟨n|.
    pub fn fock(n: usize, dim: usize) -> Self {
        assert!(n < dim, "Fock level {n} outside cutoff {dim}");
        let mut mat = DMatrix::zeros(dim, dim);
        mat[(n, n)] = C64::new(1.0, 0.0);
        Self { mat }
    }

    /// Thermal state with ρ_nn = n̄ⁿ/(n̄+1)ⁿ⁺¹, truncated and renormalized.
    pub fn thermal(nbar: f64, dim: usize) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("mean photon number {nbar} < 0")));
        }
        let ratio = nbar / (nbar + 1.0);
        let diag: Vec<C64> = (0..dim).map(|n| C64::new(ratio.powi(n as i32) / (nbar + 1.0), 0.0)).collect();
        Self::from_matrix_unchecked(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    /// Coherent state |α⟩⟨α|, truncated and renormalized.
    pub fn coherent(alpha: C64, dim: usize) -> Result<Self> {
        let mut amp = vec![C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0); dim];
        for n in 1..dim {
            amp[n] = amp[n - 1] * alpha / (n as f64).sqrt();
        }
        let v = nalgebra::DVector::from_vec(amp);
        Self::from_matrix_unchecked(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.mat[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.mat.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Checks the Hermitian, unit-trace and PSD invariants.
    pub fn validate(&self) -> Result<()> {
        validate_matrix(&self.mat)
    }

    /// Σ_{n ≥ dim−2} ρ_nn.
    pub fn tail_weight(&self) -> f64 {
        let d = self.dim();
        (d.saturating_sub(2)..d).map(|n| self.mat[(n, n)].re).sum()
    }

    /// Fails with [`Error::CutoffTooSmall`] when the tail weight exceeds [`TAIL_LIMIT`].
    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_weight();
        if tail > TAIL_LIMIT {
            return Err(Error::CutoffTooSmall { dim: self.dim(), tail, limit: TAIL_LIMIT });
        }
        Ok(())
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.mat[(n, n)].re).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self.mat[(n, n)].re).sum()
    }

    /// e^{iφn̂} ρ e^{−iφn̂}, i.e. ρ_mn → ρ_mn e^{i(m−n)φ}. Rotates every
    /// quadrature feature of the state by +φ.
    pub fn rotated(&self, phi: f64) -> Self {
        let d = self.dim();
        let mat = DMatrix::from_fn(d, d, |m, n| self.mat[(m, n)] * C64::from_polar(1.0, (m as f64 - n as f64) * phi));
        Self { mat }
    }

    /// Zero-pads to a larger cutoff, or truncates and renormalizes to a smaller one.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        let d = self.dim();
        if dim >= d {
            let mut mat = DMatrix::zeros(dim, dim);
            mat.view_mut((0, 0), (d, d)).copy_from(&self.mat);
            Ok(Self { mat })
        } else {
            Self::from_matrix_unchecked(self.mat.view((0, 0), (dim, dim)).into_owned())
        }
    }

    pub fn to_file_format(&self) -> DensityMatrixFile {
        let d = self.dim();
        DensityMatrixFile {
            dim: d,
            re: (0..d).map(|m| (0..d).map(|n| self.mat[(m, n)].re).collect()).collect(),
            im: (0..d).map(|m| (0..d).map(|n| self.mat[(m, n)].im).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file_format())?)
    }

    /// Parses the JSON file format; the loaded matrix must already satisfy
    /// the Hermiticity, trace and positivity invariants.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: DensityMatrixFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk layout: `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<DensityMatrixFile> for DensityMatrix {
    type Error = Error;

    fn try_from(file: DensityMatrixFile) -> Result<Self> {
        let d = file.dim;
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidState(format!("dim {d} outside 1..={MAX_DIM}")));
        }
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !rows_ok(&file.re) || !rows_ok(&file.im) {
            return Err(Error::InvalidState(format!("re/im must both be {d}x{d}")));
        }
        let mat = DMatrix::from_fn(d, d, |m, n| C64::new(file.re[m][n], file.im[m][n]));
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite element".into()));
        }
        validate_matrix(&mat)?;
        Ok(DensityMatrix { mat })
    }
}

pub(crate) fn hermiticity_error(mat: &DMatrix<C64>) -> f64 {
    let d = mat.nrows();
    let mut worst: f64 = 0.0;
    for m in 0..d {
        for n in m..d {
            worst = worst.max((mat[(m, n)] - mat[(n, m)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn validate_matrix(mat: &DMatrix<C64>) -> Result<()> {
    if !mat.is_square() {
        return Err(Error::InvalidState("matrix is not square".into()));
    }
    let herm = hermiticity_error(mat);
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm:.3e})")));
    }
    let tr = mat.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    let min_ev = SymmetricEigen::new(mat.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_ev < PSD_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
    }
    Ok(())
}

/// Two-mode density matrix indexed by (m, m′) → m·dim + m′, where the first
/// label is mode A and the second mode B.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeDensityMatrix {
    dim: usize,
    mat: DMatrix<C64>,
}

impl TwoModeDensityMatrix {
    pub(crate) fn from_parts(dim: usize, mat: DMatrix<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), dim * dim);
        Self { dim, mat }
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
        }
        Ok(Self { dim: a.dim(), mat: a.matrix().kronecker(b.matrix()) })
    }

    /// Per-mode cutoff.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn get(&self, (m, mp): (usize, usize), (n, np): (usize, usize)) -> C64 {
        self.mat[(m * self.dim + mp, n * self.dim + np)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn validate(&self) -> Result<()> {
        validate_matrix(&self.mat)
    }

    /// Tr_B ρ.
    pub fn reduced_a(&self) -> Result<DensityMatrix> {
        let d = self.dim;
        DensityMatrix::from_matrix_unchecked(DMatrix::from_fn(d, d, |m, n| {
            (0..d).map(|k| self.mat[(m * d + k, n * d + k)]).sum()
        }))
    }

    /// Tr_A ρ.
    pub fn reduced_b(&self) -> Result<DensityMatrix> {
        let d = self.dim;
        DensityMatrix::from_matrix_unchecked(DMatrix::from_fn(d, d, |m, n| {
            (0..d).map(|k| self.mat[(k * d + m, k * d + n)]).sum()
        }))
    }

    /// Partial transpose on mode B.
    pub fn partial_transpose_b(&self) -> DMatrix<C64> {
        let d = self.dim;
        DMatrix::from_fn(d * d, d * d, |row, col| {
            let (i, j) = (row / d, row % d);
            let (ip, jp) = (col / d, col % d);
            self.mat[(i * d + jp, ip * d + j)]
        })
    }

    /// Applies local phase rotations e^{iφ_a n̂_a} ⊗ e^{iφ_b n̂_b}.
    pub fn locally_rotated(&self, phi_a: f64, phi_b: f64) -> Self {
        let d = self.dim;
        let mat = DMatrix::from_fn(d * d, d * d, |row, col| {
            let (i, j) = (row / d, row % d);
            let (ip, jp) = (col / d, col % d);
            let phase = (i as f64 - ip as f64) * phi_a + (j as f64 - jp as f64) * phi_b;
            self.mat[(row, col)] * C64::from_polar(1.0, phase)
        });
        Self { dim: d, mat }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_populations_are_geometric() {
        let rho = DensityMatrix::thermal(1.0, 20).unwrap();
        let norm: f64 = (0..20).map(|n| 0.5f64.powi(n + 1)).sum();
        for n in 0..20 {
            let expect = 0.5f64.powi(n as i32 + 1) / norm;
            assert!((rho.get(n, n).re - expect).abs() < 1e-15);
        }
        rho.validate().unwrap();
        rho.check_tail().unwrap();
    }

    #[test]
    fn json_round_trip_preserves_elements() {
        let rho = DensityMatrix::coherent(C64::new(0.4, -0.3), 8).unwrap();
        let back = DensityMatrix::from_json(&rho.to_json().unwrap()).unwrap();
        assert_eq!(rho, back);
    }

    #[test]
    fn json_loader_rejects_bad_matrices() {
        let not_hermitian = r#"{"dim": 2, "re": [[0.5, 0.1], [0.2, 0.5]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(DensityMatrix::from_json(not_hermitian), Err(Error::InvalidState(_))));
        let bad_trace = r#"{"dim": 2, "re": [[0.5, 0], [0, 0.6]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(DensityMatrix::from_json(bad_trace), Err(Error::InvalidState(_))));
        let not_psd = r#"{"dim": 2, "re": [[1.2, 0], [0, -0.2]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matches!(DensityMatrix::from_json(not_psd), Err(Error::InvalidState(_))));
        let ragged = r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(DensityMatrix::from_json(ragged).is_err());
        let extra = r#"{"dim": 1, "re": [[1]], "im": [[0]], "note": 1}"#;
        assert!(DensityMatrix::from_json(extra).is_err());
    }

    #[test]
    fn rotation_shifts_coherent_amplitude_phase() {
        let rho = DensityMatrix::coherent(C64::new(0.7, 0.0), 12).unwrap();
        let rotated = rho.rotated(0.5);
        let expect = DensityMatrix::coherent(C64::from_polar(0.7, 0.5), 12).unwrap();
        assert!((rotated.matrix() - expect.matrix()).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_product_is_product_of_transposes() {
        let a = DensityMatrix::coherent(C64::new(0.3, 0.2), 4).unwrap();
        let b = DensityMatrix::coherent(C64::new(-0.1, 0.5), 4).unwrap();
        let ab = TwoModeDensityMatrix::product(&a, &b).unwrap();
        let expect = a.matrix().kronecker(&b.matrix().transpose());
        assert!((ab.partial_transpose_b() - expect).norm() < 1e-14);
        assert!((ab.reduced_a().unwrap().matrix() - a.matrix()).norm() < 1e-12);
        assert!((ab.reduced_b().unwrap().matrix() - b.matrix()).norm() < 1e-12);
    }
}
