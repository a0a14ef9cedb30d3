use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::quadrature::X_LIMIT;
use crate::fock::special::hermite_functions_into;
use crate::fock::DensityMatrix;
use crate::timedomain::QuadratureRecord;

/// Fewest records accepted by [`mle_reconstruct`].
pub const MIN_RECORDS: usize = 1000;
/// Phase coverage is judged on this many equal bins over [0, π) ...
pub const COVERAGE_BINS: usize = 20;
/// ... of which at least this many must be occupied.
pub const MIN_OCCUPIED_BINS: usize = 10;
/// Cells per work unit in the likelihood sums.
const CHUNK_CELLS: usize = 2048;

/// Joint (x, θ) histogram used to amortise projector evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct XBinning {
    /// Equal-width bins over [−x_range, x_range] in absolute units.
    pub bins: usize,
    pub x_range: f64,
    /// Equal-width phase bins over [0, π).
    pub phase_bins: usize,
    /// Binning is applied only from this many records on.
    pub min_records: usize,
}

impl Default for XBinning {
    fn default() -> Self {
        Self { bins: 500, x_range: 6.0, phase_bins: 128, min_records: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructionOptions {
    pub dim: usize,
    pub max_iters: usize,
    pub loglik_rel_tol: f64,
    /// `None` evaluates one projector per record.
    pub x_binning: Option<XBinning>,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        Self { dim: 20, max_iters: 2000, loglik_rel_tol: 1e-8, x_binning: Some(XBinning::default()) }
    }
}

impl ReconstructionOptions {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 || self.dim > crate::fock::beamsplitter::MAX_SPLIT_DIM {
            return Err(Error::InvalidParameter(format!("dim {} outside [2, 25]", self.dim)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        if !(self.loglik_rel_tol > 0.0 && self.loglik_rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("loglik_rel_tol {} must be positive", self.loglik_rel_tol)));
        }
        if let Some(b) = self.x_binning {
            if b.bins == 0 || b.phase_bins == 0 || !(b.x_range > 0.0 && b.x_range <= X_LIMIT) {
                return Err(Error::InvalidParameter("x_binning needs positive bin counts and 0 < x_range <= 8".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub rho: DensityMatrix,
    /// Log-likelihood of the seed followed by one entry per iteration.
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl ReconstructionResult {
    pub fn loglik_final(&self) -> f64 {
        *self.loglik_trace.last().expect("trace holds at least the seed")
    }
}

/// |x, θ⟩⟨x, θ| truncated to `dim`, with ⟨n|x, θ⟩ = e^{inθ} ψ_n(x), so that
/// Tr(ρΠ) is the quadrature density at x in absolute units.
pub fn povm_element(theta: f64, x: f64, dim: usize) -> Result<DMatrix<C64>> {
    let u = projector_vector(theta, x, dim)?;
    Ok(DMatrix::from_fn(dim, dim, |m, n| u[m] * u[n].conj()))
}

fn projector_vector(theta: f64, x: f64, dim: usize) -> Result<Vec<C64>> {
    if !(x.abs() <= X_LIMIT) {
        return Err(Error::OutOfRange { value: x, limit: X_LIMIT });
    }
    let mut psi = vec![0.0; dim];
    hermite_functions_into(x, &mut psi);
    Ok(psi.iter().enumerate().map(|(n, &p)| C64::from_polar(p, n as f64 * theta)).collect())
}

/// Weighted projector directions; the data seen by the iteration.
#[derive(Clone, Debug)]
pub struct Cells {
    dim: usize,
    /// Row-major: cell j occupies `u[j*dim..(j+1)*dim]`.
    u: Vec<C64>,
    weights: Vec<f64>,
    /// Cell of each input record, for resampling.
    record_cell: Vec<usize>,
}

impl Cells {
    /// Checks size and phase coverage, converts SNL to absolute units and
    /// bins if requested.
    pub fn build(records: &[QuadratureRecord], opts: &ReconstructionOptions) -> Result<Self> {
        opts.validate()?;
        check_coverage(records)?;
        let binning = opts.x_binning.filter(|b| records.len() >= b.min_records);
        let dim = opts.dim;
        // Cells keyed by (phase bin, x bin); records outside the x range stay single.
        let mut keyed: std::collections::BTreeMap<(usize, usize), (f64, usize)> = Default::default();
        let mut singles: Vec<(f64, f64)> = Vec::new();
        let mut key_of_record: Vec<std::result::Result<(usize, usize), usize>> = Vec::with_capacity(records.len());
        for r in records {
            let x = r.value * FRAC_1_SQRT_2;
            if !(x.abs() <= X_LIMIT) {
                return Err(Error::OutOfRange { value: x, limit: X_LIMIT });
            }
            match binning {
                Some(b) if x.abs() < b.x_range => {
                    let xb = (((x + b.x_range) / (2.0 * b.x_range)) * b.bins as f64).floor() as usize;
                    let pb = ((r.phase / PI) * b.phase_bins as f64).floor() as usize;
                    let key = (pb.min(b.phase_bins - 1), xb.min(b.bins - 1));
                    let e = keyed.entry(key).or_insert((0.0, 0));
                    e.0 += r.phase;
                    e.1 += 1;
                    key_of_record.push(Ok(key));
                }
                _ => {
                    key_of_record.push(Err(singles.len()));
                    singles.push((r.phase, x));
                }
            }
        }
        let mut u = Vec::with_capacity((keyed.len() + singles.len()) * dim);
        let mut weights = Vec::with_capacity(keyed.len() + singles.len());
        let mut index_of_key = std::collections::HashMap::with_capacity(keyed.len());
        if let Some(b) = binning {
            let width = 2.0 * b.x_range / b.bins as f64;
            for (&(pb, xb), e) in &keyed {
                let x_center = -b.x_range + (xb as f64 + 0.5) * width;
                let theta = e.0 / e.1 as f64;
                index_of_key.insert((pb, xb), weights.len());
                u.extend(projector_vector(theta, x_center, dim)?);
                weights.push(e.1 as f64);
            }
        }
        let first_single = weights.len();
        for &(theta, x) in &singles {
            u.extend(projector_vector(theta, x, dim)?);
            weights.push(1.0);
        }
        let record_cell = key_of_record
            .into_iter()
            .map(|k| match k {
                Ok(key) => index_of_key[&key],
                Err(i) => first_single + i,
            })
            .collect();
        Ok(Self { dim, u, weights, record_cell })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn record_cells(&self) -> &[usize] {
        &self.record_cell
    }

    /// Same cells with new weights, e.g. bootstrap counts.
    pub fn reweighted(&self, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), self.weights.len());
        Self { weights, ..self.clone() }
    }

    /// Log-likelihood Σ w_j ln Tr(ρ Π_j) and R = Σ w_j Π_j / Tr(ρ Π_j).
    fn evaluate(&self, rho: &DMatrix<C64>) -> (f64, DMatrix<C64>) {
        let d = self.dim;
        let n = self.len();
        let parts: Vec<(f64, Vec<C64>)> = (0..n.div_ceil(CHUNK_CELLS))
            .into_par_iter()
            .map(|c| {
                let mut loglik = 0.0;
                let mut r = vec![C64::new(0.0, 0.0); d * d];
                let mut y = vec![C64::new(0.0, 0.0); d];
                for j in c * CHUNK_CELLS..((c + 1) * CHUNK_CELLS).min(n) {
                    let w = self.weights[j];
                    if w == 0.0 {
                        continue;
                    }
                    let u = &self.u[j * d..(j + 1) * d];
                    // p = u† ρ u
                    for (m, ym) in y.iter_mut().enumerate() {
                        let mut acc = C64::new(0.0, 0.0);
                        for (k, uk) in u.iter().enumerate() {
                            acc += rho[(m, k)] * uk;
                        }
                        *ym = acc;
                    }
                    let p = u.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>().max(f64::MIN_POSITIVE);
                    loglik += w * p.ln();
                    let s = w / p;
                    for m in 0..d {
                        let um = u[m] * s;
                        for k in m..d {
                            r[m * d + k] += um * u[k].conj();
                        }
                    }
                }
                (loglik, r)
            })
            .collect();
        let mut loglik = 0.0;
        let mut r = DMatrix::<C64>::zeros(d, d);
        for (l, part) in parts {
            loglik += l;
            for m in 0..d {
                for k in m..d {
                    r[(m, k)] += part[m * d + k];
                }
            }
        }
        for m in 0..d {
            for k in 0..m {
                r[(m, k)] = r[(k, m)].conj();
            }
        }
        (loglik, r)
    }

    fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn check_coverage(records: &[QuadratureRecord]) -> Result<()> {
    if records.len() < MIN_RECORDS {
        return Err(Error::InsufficientSamples { got: records.len(), need: MIN_RECORDS });
    }
    let mut seen = [false; COVERAGE_BINS];
    for r in records {
        let b = ((r.phase / PI) * COVERAGE_BINS as f64).floor() as usize;
        seen[b.min(COVERAGE_BINS - 1)] = true;
    }
    let occupied = seen.iter().filter(|&&s| s).count();
    if occupied < MIN_OCCUPIED_BINS {
        return Err(Error::InsufficientCoverage { occupied, bins: COVERAGE_BINS, need: MIN_OCCUPIED_BINS });
    }
    Ok(())
}

/// Iterative RρR likelihood maximisation from the maximally mixed state.
pub fn mle_reconstruct(records: &[QuadratureRecord], opts: &ReconstructionOptions) -> Result<ReconstructionResult> {
    let cells = Cells::build(records, opts)?;
    let seed = DMatrix::<C64>::identity(opts.dim, opts.dim).scale(1.0 / opts.dim as f64);
    iterate(&cells, seed, opts)
}

/// RρR iteration on prepared cells from an arbitrary full-rank seed.
///
/// A plain step that would lower the likelihood is replaced by the diluted
/// step ρ → (I + εR)ρ(I + εR)/norm with ε halved until the likelihood rises,
/// so the trace is nondecreasing. Stops once both the last gain and the
/// geometric projection of the remaining gains fall below
/// `loglik_rel_tol · |L|`.
pub fn iterate(cells: &Cells, seed: DMatrix<C64>, opts: &ReconstructionOptions) -> Result<ReconstructionResult> {
    opts.validate()?;
    if seed.nrows() != cells.dim {
        return Err(Error::DimensionMismatch { left: seed.nrows(), right: cells.dim });
    }
    let n = cells.total_weight();
    let mut rho = seed;
    let (mut loglik, mut r) = cells.evaluate(&rho);
    let mut trace = vec![loglik];
    let mut converged = false;
    let mut iterations = 0;
    let mut last_gain = f64::NAN;
    while iterations < opts.max_iters {
        iterations += 1;
        let mut next = step(&rho, &r, None);
        let (mut l_next, mut r_next) = cells.evaluate(&next);
        if l_next < loglik {
            // R/N is 1 at the optimum, so ε is measured against N.
            let mut eps = 1.0 / n;
            loop {
                next = step(&rho, &r, Some(eps));
                (l_next, r_next) = cells.evaluate(&next);
                if l_next >= loglik || eps < 1e-12 / n {
                    break;
                }
                eps *= 0.5;
            }
            if l_next < loglik {
                // No ascent direction resolvable in floating point.
                converged = true;
                break;
            }
        }
        let gain = (l_next - loglik).abs();
        rho = next;
        r = r_next;
        loglik = l_next;
        trace.push(loglik);
        // Geometric extrapolation of the gains still to come; the first step has no ratio.
        let q = gain / last_gain;
        let remaining = if q < 1.0 { gain * q / (1.0 - q) } else { f64::INFINITY };
        let tol = opts.loglik_rel_tol * loglik.abs();
        if gain == 0.0 || (gain <= tol && remaining <= tol) {
            converged = true;
            break;
        }
        last_gain = gain;
    }
    Ok(ReconstructionResult {
        rho: DensityMatrix::from_matrix_unchecked(rho)?,
        loglik_trace: trace,
        iterations,
        converged,
    })
}

fn step(rho: &DMatrix<C64>, r: &DMatrix<C64>, dilution: Option<f64>) -> DMatrix<C64> {
    let op = match dilution {
        None => r.clone(),
        Some(eps) => DMatrix::<C64>::identity(r.nrows(), r.nrows()) + r.scale(eps),
    };
    let mut out = &op * rho * &op;
    // Restore exact Hermiticity before normalising.
    out = (&out + out.adjoint()).scale(0.5);
    let tr = out.trace().re;
    out.scale(1.0 / tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn povm_examples() {
        let p = povm_element(0.0, 0.0, 2).unwrap();
        assert_relative_eq!(p[(0, 0)].re, 1.0 / PI.sqrt(), epsilon = 1e-14);
        assert!(p[(0, 1)].norm() < 1e-15 && p[(1, 1)].norm() < 1e-15);
        let a = povm_element(0.0, 0.7, 6).unwrap();
        let b = povm_element(PI / 2.0, 0.7, 6).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                let phase = C64::from_polar(1.0, (m as f64 - n as f64) * PI / 2.0);
                assert!((b[(m, n)] - a[(m, n)] * phase).norm() < 1e-14);
            }
        }
        assert!(matches!(povm_element(0.0, 8.5, 4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn povm_reproduces_quadrature_density() {
        let rho = crate::fock::make_squeezed_thermal(&crate::fock::fit_squeezed_thermal(0.65, 3.45, 0.4).unwrap(), 20)
            .unwrap();
        for (theta, x) in [(0.0, 0.3), (1.1, -0.8), (2.9, 1.7)] {
            let pi = povm_element(theta, x, 20).unwrap();
            let tr = (rho.matrix() * &pi).trace().re;
            let pdf = crate::fock::quadrature_pdf(&rho, theta, &[x]).unwrap()[0];
            assert!((tr - pdf).abs() < 1e-12);
            let e = nalgebra::SymmetricEigen::new(pi.clone()).eigenvalues;
            assert!(e.iter().filter(|l| l.abs() > 1e-12).count() == 1);
        }
    }

    fn few(n: usize, phase_span: f64) -> Vec<QuadratureRecord> {
        (0..n)
            .map(|k| QuadratureRecord::new(phase_span * k as f64 / n as f64, ((k * 7) % 13) as f64 * 0.1 - 0.6))
            .collect()
    }

    #[test]
    fn input_checks() {
        let opts = ReconstructionOptions::default();
        assert!(matches!(mle_reconstruct(&few(999, PI), &opts), Err(Error::InsufficientSamples { .. })));
        assert!(matches!(mle_reconstruct(&few(2000, 0.3), &opts), Err(Error::InsufficientCoverage { .. })));
        let bad = ReconstructionOptions { dim: 1, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
