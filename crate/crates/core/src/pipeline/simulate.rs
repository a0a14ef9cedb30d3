use std::f64::consts::{PI, TAU};
use std::path::Path;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::channel::memory_channel;
use crate::error::{Error, Result};
use crate::fock::{make_squeezed_thermal, min_max_variance, DensityMatrix, QuadratureMoments};
use crate::pipeline::config::RunConfig;
use crate::pipeline::manifest::RunManifest;
use crate::timedomain::io::{write_table, TRACE_HEADER};
use crate::timedomain::shot::domain;
use crate::timedomain::waveform::{input_mode, retrieval_mode};
use crate::timedomain::{
    acquire, calibrate_snl, classical_waveforms, estimate_lo_phase, lo_phase_ramp, sideband_trace, write_quadratures,
    ClassicalWaveforms, NoiseComponent, QuadratureRecord, QuadratureSampler, ShotModel, StreamRegistry, TemporalMode,
    TimingConfig,
};

/// Which experiment is run in the storage arm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Standard,
    /// The source is blocked: vacuum enters the memory.
    StoreVacuum,
    /// The control field stays off after storage.
    NoRetrieval,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::StoreVacuum => "store-vacuum",
            Variant::NoRetrieval => "no-retrieval",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(Variant::Standard),
            "store-vacuum" => Ok(Variant::StoreVacuum),
            "no-retrieval" => Ok(Variant::NoRetrieval),
            other => Err(format!("unknown variant '{other}' (standard, store-vacuum, no-retrieval)")),
        }
    }
}

/// States entering the input arm and leaving the memory.
#[derive(Clone, Debug)]
pub struct ModelStates {
    pub input: DensityMatrix,
    pub stored: DensityMatrix,
    pub retrieved: DensityMatrix,
}

pub fn model_states(cfg: &RunConfig, variant: Variant) -> Result<ModelStates> {
    let dim = cfg.tomography.dim;
    let input = make_squeezed_thermal(&cfg.source.params()?, dim)?;
    let stored = match variant {
        Variant::StoreVacuum => DensityMatrix::vacuum(dim),
        _ => input.clone(),
    };
    let retrieved = match variant {
        Variant::NoRetrieval => DensityMatrix::vacuum(dim),
        _ => memory_channel(&stored, &cfg.channel)?,
    };
    Ok(ModelStates { input, stored, retrieved })
}

/// Output of one acquisition run.
#[derive(Clone, Debug)]
pub struct RunData {
    pub records: Vec<QuadratureRecord>,
    /// Pointwise variance across shots, SNL.
    pub trace: Vec<f64>,
    /// Factor applied to the matched-filter outputs.
    pub calibration_scale: f64,
    /// False when the sideband signal had too little contrast and the phases
    /// are ramp values with an unknown offset.
    pub phase_locked: bool,
}

/// Everything `simulate` produces before it is written out.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub states: ModelStates,
    pub waves: ClassicalWaveforms,
    pub input_control: Vec<bool>,
    pub storage_control: Vec<bool>,
    pub input: Option<RunData>,
    pub storage: RunData,
}

/// Control field on before storage and during the retrieval window.
pub fn storage_control_mask(timing: &TimingConfig, retrieval: bool) -> Vec<bool> {
    let off = timing.index_range((0.0, timing.control_off_time)).end;
    let on = timing.index_range((timing.control_on_time(), timing.control_on_time() + timing.retrieval_window));
    (0..timing.n_samples()).map(|k| k < off || (retrieval && on.contains(&k))).collect()
}

struct RunSpec<'a> {
    model: ShotModel,
    sampler: &'a QuadratureSampler,
    calib_mode: &'a TemporalMode,
    /// Variances (min, max) of the cw light seen by the sideband monitor.
    sideband: (f64, f64),
    shot_domain: u64,
    run_index: u64,
    shots: usize,
}

fn run(cfg: &RunConfig, registry: &StreamRegistry, spec: RunSpec<'_>) -> Result<RunData> {
    let timing = &cfg.timing;
    let offset = registry.claim(domain::PIEZO, spec.run_index)?.random::<f64>() * TAU;
    let ramp: Vec<f64> = (0..spec.shots as u64).map(|k| lo_phase_ramp(k, timing)).collect();
    let true_phases: Vec<f64> = ramp.iter().map(|r| r + offset).collect();
    let mut rng = registry.claim(domain::SIDEBAND, spec.run_index)?;
    let (vmin, vmax) = spec.sideband;
    let monitor = sideband_trace(&true_phases, vmin, vmax, cfg.source.phase_rad, cfg.analysis.sideband_noise, &mut rng);
    let (phases, phase_locked) = match estimate_lo_phase(&monitor, timing, cfg.source.phase_rad) {
        Ok(p) => (p, true),
        Err(Error::LowContrast { .. }) => (ramp.iter().map(|r| r.rem_euclid(PI)).collect(), false),
        Err(e) => return Err(e),
    };
    let acq = acquire(&spec.model, spec.sampler, &true_phases, spec.calib_mode, registry, spec.shot_domain)?;
    let scale = calibrate_snl(&acq.calib_raw)?;
    let records = phases.iter().zip(&acq.raw).map(|(&p, &q)| QuadratureRecord::new(p, q * scale)).collect();
    let trace = acq.trace.normalised(timing.index_range(timing.calib_window))?;
    Ok(RunData { records, trace, calibration_scale: scale, phase_locked })
}

/// Runs the storage arm, preceded by the input arm when `with_input` is set.
pub fn simulate(cfg: &RunConfig, variant: Variant, with_input: bool) -> Result<Dataset> {
    cfg.validate()?;
    let timing = &cfg.timing;
    let registry = StreamRegistry::new(cfg.seed);
    let states = model_states(cfg, variant)?;
    let waves = classical_waveforms(timing, cfg.channel.efficiency())?;
    let dt = timing.dt();
    let calib_mode = TemporalMode::flat(dt, timing.index_range(timing.calib_window))?;
    let source = min_max_variance(&states.input);
    let cov_in = QuadratureMoments::of(&states.input).cov;
    let sideband = match variant {
        Variant::StoreVacuum => (1.0, 1.0),
        _ => (source.vmin, source.vmax),
    };
    let floor = cfg.channel.raman_variance_snl();

    let input_control = vec![false; timing.n_samples()];
    let input = if with_input {
        let sampler = QuadratureSampler::new(&states.input);
        let model = ShotModel::new(
            dt,
            input_mode(timing, &waves)?,
            input_control.clone(),
            floor,
            vec![NoiseComponent::new(&waves.input, cov_in)],
        )?;
        let spec = RunSpec {
            model,
            sampler: &sampler,
            calib_mode: &calib_mode,
            sideband,
            shot_domain: domain::INPUT_SHOTS,
            run_index: 0,
            shots: timing.shots,
        };
        Some(run(cfg, &registry, spec)?)
    } else {
        None
    };

    let retrieval = variant != Variant::NoRetrieval;
    let storage_control = storage_control_mask(timing, retrieval);
    let mut components = Vec::new();
    if variant != Variant::StoreVacuum {
        components.push(NoiseComponent::new(&waves.front, cov_in));
    }
    if retrieval {
        components.push(NoiseComponent::new(&waves.retrieval, QuadratureMoments::of(&states.retrieved).cov));
    }
    let sampler = QuadratureSampler::new(&states.retrieved);
    let model = ShotModel::new(dt, retrieval_mode(timing, &waves)?, storage_control.clone(), floor, components)?;
    let spec = RunSpec {
        model,
        sampler: &sampler,
        calib_mode: &calib_mode,
        sideband,
        shot_domain: domain::STORAGE_SHOTS,
        run_index: 1,
        shots: timing.shots,
    };
    let storage = run(cfg, &registry, spec)?;
    Ok(Dataset { states, waves, input_control, storage_control, input, storage })
}

fn table_bytes(header: &[&str], columns: &[&[f64]]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_table(header, columns, &mut buf)?;
    Ok(buf)
}

fn mask_column(mask: &[bool]) -> Vec<f64> {
    mask.iter().map(|&on| if on { 1.0 } else { 0.0 }).collect()
}

pub const WAVEFORM_HEADER: [&str; 6] =
    ["time_us", "input", "front", "retrieval", "control_on_input", "control_on_storage"];

/// Simulates and writes the dataset. `traces_only` skips the quadrature
/// files and the model states.
pub fn cmd_simulate(cfg: &RunConfig, variant: Variant, out_dir: &Path, traces_only: bool) -> Result<RunManifest> {
    let data = simulate(cfg, variant, true)?;
    std::fs::create_dir_all(out_dir)?;
    let command = if traces_only { "traces" } else { "simulate" };
    let mut manifest = RunManifest::new(command, Some(variant.label()), cfg);
    let input = data.input.as_ref().expect("input arm was simulated");
    let w = &data.waves;
    let waves = table_bytes(
        &WAVEFORM_HEADER,
        &[
            &w.times,
            &w.input,
            &w.front,
            &w.retrieval,
            &mask_column(&data.input_control),
            &mask_column(&data.storage_control),
        ],
    )?;
    manifest.emit(out_dir, "waveforms.csv", &waves)?;
    manifest.emit(out_dir, "variance_trace_input.csv", &table_bytes(&TRACE_HEADER, &[&w.times, &input.trace])?)?;
    manifest.emit(
        out_dir,
        "variance_trace_storage.csv",
        &table_bytes(&TRACE_HEADER, &[&w.times, &data.storage.trace])?,
    )?;
    if !traces_only {
        for (name, run) in [("input_quadratures.csv", input), ("retrieved_quadratures.csv", &data.storage)] {
            let mut buf = Vec::new();
            write_quadratures(&run.records, &mut buf)?;
            manifest.emit(out_dir, name, &buf)?;
        }
        manifest.emit(out_dir, "model_input_rho.json", data.states.input.to_json()?.as_bytes())?;
        manifest.emit(out_dir, "model_retrieved_rho.json", data.states.retrieved.to_json()?.as_bytes())?;
    }
    manifest.record("calibration_scale_input", input.calibration_scale)?;
    manifest.record("calibration_scale_storage", data.storage.calibration_scale)?;
    manifest.record("phase_locked_input", input.phase_locked)?;
    manifest.record("phase_locked_storage", data.storage.phase_locked)?;
    manifest.record("efficiency", cfg.channel.efficiency())?;
    manifest.finish(out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.timing.shots = 2000;
        cfg
    }

    #[test]
    fn control_mask_segments() {
        let t = TimingConfig::default();
        let m = storage_control_mask(&t, true);
        assert!(m[0] && m[101] && !m[102] && !m[201] && m[202] && m[601] && !m[602]);
        assert!(!storage_control_mask(&t, false)[300]);
    }

    #[test]
    fn variants_parse() {
        for v in [Variant::Standard, Variant::StoreVacuum, Variant::NoRetrieval] {
            assert_eq!(v.label().parse::<Variant>().unwrap(), v);
        }
        assert!("bogus".parse::<Variant>().is_err());
    }

    #[test]
    fn small_run_is_locked_and_calibrated() {
        let data = simulate(&small(), Variant::Standard, true).unwrap();
        let input = data.input.unwrap();
        assert!(input.phase_locked && data.storage.phase_locked);
        assert_eq!(input.records.len(), 2000);
        assert!((input.calibration_scale - 1.0).abs() < 0.1);
        assert!(input.records.iter().all(|r| (0.0..PI).contains(&r.phase)));
    }

    #[test]
    fn vacuum_storage_has_no_phase_reference() {
        let data = simulate(&small(), Variant::StoreVacuum, false).unwrap();
        assert!(data.input.is_none());
        assert!(!data.storage.phase_locked);
    }
}
