use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    add_vacuum_units_to_dim, entanglement_potential, fidelity, min_max_variance, quad_variance, wigner, DensityMatrix,
    LogBase,
};
use crate::pipeline::config::RunConfig;
use crate::pipeline::manifest::RunManifest;
use crate::timedomain::io::write_table;

/// Extra Fock levels used when two vacuum units are added to a state.
pub const ADDED_NOISE_EXTRA_DIM: usize = 12;

pub const VARIANCE_CURVE_POINTS: usize = 181;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
    pub vmin_snl: f64,
    pub vmax_snl: f64,
    pub theta_min_rad: f64,
    pub phase_symmetric: bool,
}

impl StateSummary {
    pub fn of(rho: &DensityMatrix) -> Self {
        let e = min_max_variance(rho);
        Self {
            squeezing_db: e.squeezing_db(),
            antisqueezing_db: e.antisqueezing_db(),
            vmin_snl: e.vmin,
            vmax_snl: e.vmax,
            theta_min_rad: e.theta_min,
            phase_symmetric: e.degenerate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Fidelity after rotating the retrieved state onto the input axis.
    pub fidelity: f64,
    /// Input against itself with two vacuum units of added noise.
    pub classical_fidelity_addnoise: f64,
    /// Input against the vacuum.
    pub classical_fidelity_vacuum: f64,
    pub ep_in: f64,
    pub ep_retr: f64,
    pub ep_log_base: LogBase,
    pub alignment_rotation_rad: f64,
    pub input: StateSummary,
    pub retrieved: StateSummary,
}

pub fn compute_metrics(rho_in: &DensityMatrix, rho_retr: &DensityMatrix, base: LogBase) -> Result<Metrics> {
    if rho_in.dim() != rho_retr.dim() {
        return Err(Error::DimensionMismatch { left: rho_in.dim(), right: rho_retr.dim() });
    }
    rho_in.validate()?;
    rho_retr.validate()?;
    let input = StateSummary::of(rho_in);
    let retrieved = StateSummary::of(rho_retr);
    let rotation = if input.phase_symmetric || retrieved.phase_symmetric {
        0.0
    } else {
        input.theta_min_rad - retrieved.theta_min_rad
    };
    let dim = rho_in.dim();
    let big = dim + ADDED_NOISE_EXTRA_DIM;
    let noisy = add_vacuum_units_to_dim(rho_in, 2.0, big)?;
    Ok(Metrics {
        fidelity: fidelity(rho_in, &rho_retr.rotated(rotation))?,
        classical_fidelity_addnoise: fidelity(&rho_in.embed(big)?, &noisy)?,
        classical_fidelity_vacuum: fidelity(rho_in, &DensityMatrix::vacuum(dim))?,
        ep_in: entanglement_potential(rho_in, base)?,
        ep_retr: entanglement_potential(rho_retr, base)?,
        ep_log_base: base,
        alignment_rotation_rad: rotation,
        input,
        retrieved,
    })
}

/// Uniform grid of `n` points on [−extent, extent].
pub fn symmetric_grid(extent: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64).collect()
}

/// Long-format (x, p, W) table, x varying slowest.
pub fn wigner_table(rho: &DensityMatrix, extent: f64, n: usize) -> Result<Vec<u8>> {
    let grid = symmetric_grid(extent, n);
    let w = wigner(rho, &grid, &grid)?;
    let (mut xs, mut ps, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &x) in grid.iter().enumerate() {
        for (j, &p) in grid.iter().enumerate() {
            xs.push(x);
            ps.push(p);
            ws.push(w[(i, j)]);
        }
    }
    let mut buf = Vec::new();
    write_table(&["x", "p", "W"], &[&xs, &ps, &ws], &mut buf)?;
    Ok(buf)
}

pub fn variance_curves(rho_in: &DensityMatrix, rho_retr: &DensityMatrix) -> Result<Vec<u8>> {
    let n = VARIANCE_CURVE_POINTS;
    let theta: Vec<f64> = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
    let v_in: Vec<f64> = theta.iter().map(|&t| quad_variance(rho_in, t)).collect();
    let v_retr: Vec<f64> = theta.iter().map(|&t| quad_variance(rho_retr, t)).collect();
    let mut buf = Vec::new();
    write_table(&["theta_rad", "v_in_snl", "v_retr_snl"], &[&theta, &v_in, &v_retr], &mut buf)?;
    Ok(buf)
}

/// Writes metrics.json, wigner_in.csv, wigner_retr.csv and
/// variance_curves.csv.
pub fn cmd_report(rho_in_path: &Path, rho_retr_path: &Path, cfg: &RunConfig, out_dir: &Path) -> Result<Metrics> {
    let rho_in = DensityMatrix::read_json(rho_in_path)?;
    let rho_retr = DensityMatrix::read_json(rho_retr_path)?;
    let metrics = compute_metrics(&rho_in, &rho_retr, cfg.analysis.log_base)?;
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new("report", None, cfg);
    let text = serde_json::to_string_pretty(&metrics)? + "\n";
    manifest.emit(out_dir, "metrics.json", text.as_bytes())?;
    let (extent, n) = (cfg.analysis.wigner_extent, cfg.analysis.wigner_points);
    manifest.emit(out_dir, "wigner_in.csv", &wigner_table(&rho_in, extent, n)?)?;
    manifest.emit(out_dir, "wigner_retr.csv", &wigner_table(&rho_retr, extent, n)?)?;
    manifest.emit(out_dir, "variance_curves.csv", &variance_curves(&rho_in, &rho_retr)?)?;
    manifest.finish_as(out_dir, "report_manifest.json")?;
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fit_squeezed_thermal, make_squeezed_thermal};

    #[test]
    fn identical_states() {
        let rho = make_squeezed_thermal(&fit_squeezed_thermal(0.65, 3.45, 0.4).unwrap(), 20).unwrap();
        let m = compute_metrics(&rho, &rho, LogBase::Two).unwrap();
        assert!((m.fidelity - 1.0).abs() < 1e-9);
        assert_eq!(m.ep_in, m.ep_retr);
        assert_eq!(m.alignment_rotation_rad, 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let err = compute_metrics(&DensityMatrix::vacuum(10), &DensityMatrix::vacuum(12), LogBase::E);
        assert!(matches!(err, Err(Error::DimensionMismatch { left: 10, right: 12 })));
    }

    #[test]
    fn wigner_table_rows() {
        let text = String::from_utf8(wigner_table(&DensityMatrix::vacuum(4), 2.0, 5).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 26);
        assert!(text.starts_with("x,p,W\n-2,-2,"));
    }
}
