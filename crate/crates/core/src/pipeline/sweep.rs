use std::f64::consts::PI;
use std::path::Path;

use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::min_max_variance;
use crate::pipeline::config::RunConfig;
use crate::pipeline::manifest::RunManifest;
use crate::pipeline::simulate::{simulate, Variant};
use crate::timedomain::shot::{domain, stream_rng};
use crate::tomography::{extract_phase_resolved, mle_reconstruct, unwrap_to_line, PhasePoint, SweepMode, UnwrapFit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    /// Two-photon detuning, MHz.
    Detuning,
    /// Storage time, μs.
    StorageTime,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "detuning" => Ok(SweepParam::Detuning),
            "storage_time" | "storage-time" => Ok(SweepParam::StorageTime),
            other => Err(format!("unknown sweep parameter '{other}' (detuning, storage_time)")),
        }
    }
}

impl SweepParam {
    pub fn mode(self, cfg: &RunConfig) -> SweepMode {
        match self {
            SweepParam::Detuning => SweepMode::DetuningSweep { tau_storage: cfg.channel.tau_storage },
            SweepParam::StorageTime => SweepMode::TimeSweep { delta_2photon: cfg.channel.delta_2photon },
        }
    }

    /// Run configuration for one point of the sweep.
    pub fn apply(self, cfg: &RunConfig, value: f64) -> RunConfig {
        let mut out = match self {
            SweepParam::Detuning => {
                let mut c = cfg.clone();
                c.channel.delta_2photon = value;
                c
            }
            SweepParam::StorageTime => cfg.with_storage_time(value),
        };
        out.timing.shots = cfg.analysis.sweep_shots;
        out
    }
}

/// Seed of the `index`-th independent job derived from a run seed
/// (SplitMix64 finaliser).
pub fn job_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub control: f64,
    pub phase_mod_pi: Option<f64>,
    pub unwrapped: Option<f64>,
    /// Fitted line at this control value.
    pub model: Option<f64>,
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
    /// Set when the phase could not be extracted; the row is left out of the fit.
    pub skipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub param: SweepParam,
    pub mode: SweepMode,
    pub slope: f64,
    pub intercept: f64,
    pub expected_slope: f64,
    pub relative_slope_error: f64,
    pub ambiguous: bool,
    pub points_used: usize,
    pub points_skipped: usize,
    pub shots_per_point: usize,
    pub phase_noise_rad: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub fit: UnwrapFit,
    pub summary: SweepSummary,
}

struct PointResult {
    phase: Option<f64>,
    /// vmax − vmin of the reconstruction.
    contrast: f64,
    squeezing_db: f64,
    antisqueezing_db: f64,
}

fn run_point(cfg: &RunConfig, param: SweepParam, value: f64, index: usize) -> Result<PointResult> {
    let mut point = param.apply(cfg, value);
    point.seed = job_seed(cfg.seed, index as u64);
    let data = simulate(&point, Variant::Standard, false)?;
    let result = mle_reconstruct(&data.storage.records, &point.tomography)?;
    let ext = min_max_variance(&result.rho);
    // Statistical resolution of a variance estimated from all records.
    let resolution = (2.0 / data.storage.records.len() as f64).sqrt();
    let phase = match extract_phase_resolved(&result.rho, resolution) {
        Ok(p) => Some(p),
        Err(Error::DegeneratePhase { .. }) => None,
        Err(e) => return Err(e),
    };
    let noise = cfg.analysis.sweep_phase_noise_rad;
    let phase = phase.map(|p| {
        if noise > 0.0 {
            let z: f64 = stream_rng(cfg.seed, domain::SWEEP_NOISE, index as u64).sample(StandardNormal);
            (p + noise * z).rem_euclid(PI)
        } else {
            p
        }
    });
    Ok(PointResult {
        phase,
        contrast: ext.vmax - ext.vmin,
        squeezing_db: ext.squeezing_db(),
        antisqueezing_db: ext.antisqueezing_db(),
    })
}

/// One end-to-end storage run per value, then a line fit of the unwrapped
/// retrieved-state phases.
pub fn run_sweep(cfg: &RunConfig, param: SweepParam, values: &[f64]) -> Result<SweepOutcome> {
    cfg.validate()?;
    if values.len() < 3 {
        return Err(Error::Fit(format!("{} sweep values given, at least 3 required", values.len())));
    }
    for &v in values {
        param.apply(cfg, v).validate()?;
    }
    let results: Vec<PointResult> =
        values.par_iter().enumerate().map(|(i, &v)| run_point(cfg, param, v, i)).collect::<Result<_>>()?;
    let points: Vec<PhasePoint> =
        values.iter().zip(&results).filter_map(|(&c, r)| r.phase.map(|p| PhasePoint::new(c, p))).collect();
    if points.len() < 3 {
        // Too few points with a defined phase to fit a line.
        let contrast = results.iter().filter(|r| r.phase.is_none()).map(|r| r.contrast).fold(0.0, f64::max);
        return Err(Error::DegeneratePhase { contrast });
    }
    let mode = param.mode(cfg);
    let fit = unwrap_to_line(&points, mode)?;
    let mut used = fit.points.iter();
    let rows: Vec<SweepRow> = values
        .iter()
        .zip(&results)
        .map(|(&c, r)| {
            let lifted = r.phase.and_then(|_| used.next());
            SweepRow {
                control: c,
                phase_mod_pi: r.phase,
                unwrapped: lifted.map(|p| p.unwrapped),
                model: lifted.map(|_| fit.slope * c + fit.intercept),
                squeezing_db: r.squeezing_db,
                antisqueezing_db: r.antisqueezing_db,
                skipped: r.phase.is_none(),
            }
        })
        .collect();
    let expected = mode.expected_slope();
    let summary = SweepSummary {
        param,
        mode,
        slope: fit.slope,
        intercept: fit.intercept,
        expected_slope: expected,
        relative_slope_error: (fit.slope - expected) / expected,
        ambiguous: fit.ambiguous,
        points_used: fit.points.len(),
        points_skipped: rows.iter().filter(|r| r.skipped).count(),
        shots_per_point: cfg.analysis.sweep_shots,
        phase_noise_rad: cfg.analysis.sweep_phase_noise_rad,
    };
    Ok(SweepOutcome { rows, fit, summary })
}

pub const SWEEP_HEADER: [&str; 7] =
    ["control_value", "phase_mod_pi", "unwrapped", "model", "squeezing_db", "antisqueezing_db", "skipped"];

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.control.to_string(),
            opt(r.phase_mod_pi),
            opt(r.unwrapped),
            opt(r.model),
            r.squeezing_db.to_string(),
            r.antisqueezing_db.to_string(),
            (r.skipped as u8).to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Writes sweep.csv and sweep_fit.json.
pub fn cmd_sweep(cfg: &RunConfig, param: SweepParam, values: &[f64], out_dir: &Path) -> Result<SweepOutcome> {
    let outcome = run_sweep(cfg, param, values)?;
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest::new("sweep", None, cfg);
    manifest.emit(out_dir, "sweep.csv", &sweep_csv(&outcome.rows)?)?;
    let text = serde_json::to_string_pretty(&outcome.summary)? + "\n";
    manifest.emit(out_dir, "sweep_fit.json", text.as_bytes())?;
    manifest.record("values", values)?;
    manifest.finish_as(out_dir, "sweep_manifest.json")?;
    Ok(outcome)
}
