use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use nalgebra::Matrix2;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::timedomain::sampler::QuadratureSampler;
use crate::timedomain::waveform::TemporalMode;

/// Independent random streams used by a run.
pub mod domain {
    pub const INPUT_SHOTS: u64 = 1;
    pub const STORAGE_SHOTS: u64 = 2;
    pub const SIDEBAND: u64 = 3;
    pub const PIEZO: u64 = 4;
    pub const BOOTSTRAP: u64 = 5;
    pub const SWEEP_NOISE: u64 = 6;
    pub const TEST: u64 = 99;
}

/// ChaCha8 keyed by (seed, domain), positioned on stream `index`.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Hands out each (domain, index) stream at most once.
#[derive(Debug)]
pub struct StreamRegistry {
    seed: u64,
    claimed: Mutex<HashSet<(u64, u64)>>,
}

impl StreamRegistry {
    pub fn new(seed: u64) -> Self {
        Self { seed, claimed: Mutex::new(HashSet::new()) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn claim(&self, domain: u64, index: u64) -> Result<ChaCha8Rng> {
        let fresh = self.claimed.lock().expect("stream registry poisoned").insert((domain, index));
        if !fresh {
            return Err(Error::SeedReuse { domain, shot: index });
        }
        Ok(stream_rng(self.seed, domain, index))
    }
}

/// One acquisition: photocurrent in SNL units per √μs.
#[derive(Clone, Debug, PartialEq)]
pub struct ShotRecord {
    pub lo_phase: f64,
    pub samples: Vec<f64>,
    pub control_on_mask: Arc<[bool]>,
}

/// A classical pulse component whose quadrature noise rides on the local
/// floor, weighted by its peak-normalised intensity envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseComponent {
    pub envelope: Vec<f64>,
    /// Absolute-unit covariance of the light in this component.
    pub cov: Matrix2<f64>,
}

impl NoiseComponent {
    pub fn new(intensity: &[f64], cov: Matrix2<f64>) -> Self {
        let peak = intensity.iter().cloned().fold(0.0, f64::max);
        let envelope = if peak > 0.0 { intensity.iter().map(|v| v / peak).collect() } else { intensity.to_vec() };
        Self { envelope, cov }
    }

    /// SNL variance of the component at LO phase θ.
    pub fn variance_snl(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        2.0 * (c * c * self.cov[(0, 0)] + s * s * self.cov[(1, 1)] + 2.0 * s * c * self.cov[(0, 1)])
    }
}

/// Everything fixed across the shots of one run.
#[derive(Clone, Debug)]
pub struct ShotModel {
    pub dt: f64,
    pub mode: TemporalMode,
    pub control_on: Arc<[bool]>,
    /// Floor with the control field on, SNL.
    pub raman_floor: f64,
    pub components: Vec<NoiseComponent>,
}

impl ShotModel {
    pub fn new(
        dt: f64,
        mode: TemporalMode,
        control_on: Vec<bool>,
        raman_floor: f64,
        components: Vec<NoiseComponent>,
    ) -> Result<Self> {
        let n = control_on.len();
        if mode.range().end > n {
            return Err(Error::WindowMismatch(format!("mode ends at sample {} of {n}", mode.range().end)));
        }
        if (mode.dt - dt).abs() > 1e-12 * dt {
            return Err(Error::WindowMismatch(format!("mode dt {} differs from sampling dt {dt}", mode.dt)));
        }
        if components.iter().any(|c| c.envelope.len() != n) {
            return Err(Error::WindowMismatch("noise envelope length differs from the acquisition".into()));
        }
        if !(raman_floor >= 1.0) {
            return Err(Error::InvalidParameter(format!("floor {raman_floor} below the shot-noise level")));
        }
        Ok(Self { dt, mode, control_on: control_on.into(), raman_floor, components })
    }

    pub fn n_samples(&self) -> usize {
        self.control_on.len()
    }

    /// Pointwise noise variance N_k(θ) in SNL units.
    pub fn floor_at(&self, theta: f64) -> Vec<f64> {
        let comp: Vec<f64> = self.components.iter().map(|c| c.variance_snl(theta)).collect();
        self.control_on
            .iter()
            .enumerate()
            .map(|(k, &on)| {
                let floor = if on { self.raman_floor } else { 1.0 };
                let extra: f64 = self.components.iter().zip(&comp).map(|(c, v)| c.envelope[k] * (v - floor)).sum();
                (floor + extra).max(0.0)
            })
            .collect()
    }

    /// Draws q from the sampler at phase θ and builds
    /// i_k = w_k + (q − Σ_j w_j f_j dt)·f_k, so the matched filter returns q
    /// and the complement of f carries the floor noise.
    pub fn synthesize<R: rand::Rng + ?Sized>(
        &self,
        sampler: &QuadratureSampler,
        theta: f64,
        rng: &mut R,
    ) -> ShotRecord {
        let q = sampler.sample(theta, rng.random(), rng.random());
        self.synthesize_value(q, theta, rng)
    }

    /// As [`ShotModel::synthesize`] with a given quadrature value.
    pub fn synthesize_value<R: rand::Rng + ?Sized>(&self, q: f64, theta: f64, rng: &mut R) -> ShotRecord {
        let inv_dt = 1.0 / self.dt;
        let mut samples: Vec<f64> = self
            .floor_at(theta)
            .into_iter()
            .map(|n| {
                let z: f64 = rng.sample(StandardNormal);
                (n * inv_dt).sqrt() * z
            })
            .collect();
        let range = self.mode.range();
        let proj: f64 =
            samples[range.clone()].iter().zip(&self.mode.samples).map(|(w, f)| w * f).sum::<f64>() * self.dt;
        for (s, f) in samples[range].iter_mut().zip(&self.mode.samples) {
            *s += (q - proj) * f;
        }
        ShotRecord { lo_phase: theta, samples, control_on_mask: self.control_on.clone() }
    }
}

/// q = Σ_k i_k f_k dt.
pub fn matched_filter(shot: &ShotRecord, mode: &TemporalMode) -> Result<f64> {
    project(&shot.samples, mode)
}

pub(crate) fn project(samples: &[f64], mode: &TemporalMode) -> Result<f64> {
    let range = mode.range();
    if range.end > samples.len() {
        return Err(Error::WindowMismatch(format!("mode ends at sample {} of {}", range.end, samples.len())));
    }
    Ok(samples[range].iter().zip(&mode.samples).map(|(i, f)| i * f).sum::<f64>() * mode.dt)
}

/// Fewest vacuum values accepted by [`calibrate_snl`].
pub const MIN_CALIBRATION_SAMPLES: usize = 1000;

/// Scale 1/√(sample variance) that maps vacuum values to unit variance.
pub fn calibrate_snl(vacuum_raw: &[f64]) -> Result<f64> {
    if vacuum_raw.len() < MIN_CALIBRATION_SAMPLES {
        return Err(Error::InsufficientSamples { got: vacuum_raw.len(), need: MIN_CALIBRATION_SAMPLES });
    }
    let (_, var) = mean_variance(vacuum_raw);
    if !(var > 0.0 && var.is_finite()) {
        return Err(Error::InvalidParameter(format!("calibration variance {var} is not positive")));
    }
    Ok(1.0 / var.sqrt())
}

/// Sample mean and unbiased variance.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let mut acc = Moments::default();
    values.iter().for_each(|&v| acc.push(v));
    (acc.mean, acc.variance())
}

/// Streaming mean and second central moment.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise combination; deterministic for a fixed merge order.
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Per-sample moments across shots.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceAccumulator {
    pub moments: Vec<Moments>,
}

impl VarianceAccumulator {
    pub fn new(n_samples: usize) -> Self {
        Self { moments: vec![Moments::default(); n_samples] }
    }

    pub fn push(&mut self, samples: &[f64]) {
        self.moments.iter_mut().zip(samples).for_each(|(m, &x)| m.push(x));
    }

    pub fn merge(&mut self, other: &Self) {
        self.moments.iter_mut().zip(&other.moments).for_each(|(m, o)| m.merge(o));
    }

    pub fn count(&self) -> u64 {
        self.moments.first().map_or(0, |m| m.count)
    }

    /// Pointwise variances normalised to their mean over `calib`.
    pub fn normalised(&self, calib: std::ops::Range<usize>) -> Result<Vec<f64>> {
        let v: Vec<f64> = self.moments.iter().map(Moments::variance).collect();
        if calib.is_empty() || calib.end > v.len() {
            return Err(Error::WindowMismatch(format!("calibration samples {calib:?} outside {} samples", v.len())));
        }
        let reference = v[calib.clone()].iter().sum::<f64>() / calib.len() as f64;
        if !(reference > 0.0) {
            return Err(Error::InvalidParameter("calibration segment has zero variance".into()));
        }
        Ok(v.iter().map(|x| x / reference).collect())
    }
}

/// Fewest shots accepted by [`variance_trace`].
pub const MIN_TRACE_SHOTS: usize = 1000;

/// Pointwise variance across shots in SNL, normalised on `calib`.
pub fn variance_trace(shots: &[ShotRecord], calib: std::ops::Range<usize>) -> Result<Vec<f64>> {
    if shots.len() < MIN_TRACE_SHOTS {
        return Err(Error::InsufficientSamples { got: shots.len(), need: MIN_TRACE_SHOTS });
    }
    let mut acc = VarianceAccumulator::new(shots[0].samples.len());
    shots.iter().for_each(|s| acc.push(&s.samples));
    acc.normalised(calib)
}
