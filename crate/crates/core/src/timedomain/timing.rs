use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acquisition timing. All times in μs unless the field name says otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingConfig {
    /// Full width at half maximum of the input intensity.
    pub pulse_fwhm: f64,
    /// Centre of the input pulse.
    pub pulse_center: f64,
    /// Moment the control field is switched off to store the pulse.
    pub control_off_time: f64,
    pub storage_duration: f64,
    /// How long the control field stays on after it is switched back on.
    pub retrieval_window: f64,
    /// 1/e decay time of the retrieved intensity.
    pub retrieval_decay: f64,
    /// Control-off, source-free segment used for shot-noise calibration.
    pub calib_window: (f64, f64),
    pub acq_window: f64,
    /// Samples per μs.
    pub sample_rate: f64,
    /// Shot repetition period, ms.
    pub rep_period: f64,
    /// LO piezo ramp period, s.
    pub lo_ramp_period: f64,
    pub shots: usize,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            pulse_fwhm: 0.6,
            pulse_center: 0.8,
            control_off_time: 1.02,
            storage_duration: 1.0,
            retrieval_window: 4.0,
            retrieval_decay: 0.3,
            calib_window: (1.4, 2.0),
            acq_window: 8.0,
            sample_rate: 100.0,
            rep_period: 4.0,
            lo_ramp_period: 2.5,
            shots: 100_000,
        }
    }
}

/// The retrieved mode is cut off after this many decay times.
pub const RETRIEVAL_MODE_DECAYS: f64 = 6.0;

impl TimingConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pulse_fwhm", self.pulse_fwhm),
            ("retrieval_window", self.retrieval_window),
            ("retrieval_decay", self.retrieval_decay),
            ("acq_window", self.acq_window),
            ("sample_rate", self.sample_rate),
            ("rep_period", self.rep_period),
            ("lo_ramp_period", self.lo_ramp_period),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.storage_duration >= 0.0 && self.storage_duration.is_finite()) {
            return Err(Error::Config(format!("storage_duration = {} must be >= 0", self.storage_duration)));
        }
        if self.sample_rate * self.pulse_fwhm < 20.0 {
            return Err(Error::Config(format!(
                "sample_rate·pulse_fwhm = {} must be at least 20",
                self.sample_rate * self.pulse_fwhm
            )));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be positive".into()));
        }
        let (start, end) = self.pulse_support();
        if start < 0.0 {
            return Err(Error::Config(format!("pulse starts at {start} before the acquisition")));
        }
        if !(self.control_off_time > start && self.control_off_time <= end) {
            return Err(Error::Config(format!(
                "control_off_time = {} must fall inside the pulse ({start}, {end}]",
                self.control_off_time
            )));
        }
        let retrieval_end = self.control_on_time() + self.retrieval_window;
        if retrieval_end > self.acq_window + 1e-9 {
            return Err(Error::Config(format!(
                "retrieval ends at {retrieval_end} after acq_window {}",
                self.acq_window
            )));
        }
        if self.retrieval_mode_window().1 > retrieval_end + 1e-9 {
            return Err(Error::Config("retrieval_window shorter than the retrieved mode".into()));
        }
        let (c0, c1) = self.calib_window;
        if !(c0 < c1 && c0 >= 0.0 && c1 <= self.acq_window + 1e-9) {
            return Err(Error::Config(format!("calib_window ({c0}, {c1}) not ordered inside acq_window")));
        }
        if c0 < end - 1e-9 {
            return Err(Error::Config(format!("calib_window starts at {c0}, before the input pulse ends at {end}")));
        }
        let in_storage = c0 >= self.control_off_time - 1e-9 && c1 <= self.control_on_time() + 1e-9;
        let after_retrieval = c0 >= retrieval_end - 1e-9;
        if !(in_storage || after_retrieval) {
            return Err(Error::Config(format!("calib_window ({c0}, {c1}) overlaps a control-on segment")));
        }
        if ((c1 - c0) * self.sample_rate).round() < 1.0 {
            return Err(Error::Config("calib_window shorter than one sample".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn n_samples(&self) -> usize {
        (self.acq_window * self.sample_rate).round() as usize
    }

    /// Sample times t_k = k·dt.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.n_samples()).map(|k| k as f64 * dt).collect()
    }

    /// Index range of samples with t_k in [start, end).
    pub fn index_range(&self, (start, end): (f64, f64)) -> std::ops::Range<usize> {
        let n = self.n_samples();
        let i0 = ((start * self.sample_rate).round().max(0.0) as usize).min(n);
        let i1 = ((end * self.sample_rate).round().max(0.0) as usize).min(n);
        i0..i1.max(i0)
    }

    /// Closed interval outside which the input intensity vanishes.
    pub fn pulse_support(&self) -> (f64, f64) {
        (self.pulse_center - self.pulse_fwhm, self.pulse_center + self.pulse_fwhm)
    }

    pub fn control_on_time(&self) -> f64 {
        self.control_off_time + self.storage_duration
    }

    /// Window holding the retrieval transient.
    pub fn retrieval_mode_window(&self) -> (f64, f64) {
        let t_on = self.control_on_time();
        (t_on, t_on + RETRIEVAL_MODE_DECAYS * self.retrieval_decay)
    }

    /// Shots per full LO ramp period.
    pub fn shots_per_ramp(&self) -> f64 {
        self.lo_ramp_period * 1e3 / self.rep_period
    }

    /// Copy with a new storage time. If the calibration window no longer sits
    /// inside the storage gap it is moved behind the retrieval window,
    /// lengthening the acquisition when needed.
    pub fn with_storage_duration(&self, storage_duration: f64) -> Self {
        let mut out = Self { storage_duration, ..self.clone() };
        let (c0, c1) = self.calib_window;
        let width = c1 - c0;
        let gap_ok = c0 >= out.control_off_time && c1 <= out.control_on_time();
        let retrieval_end = out.control_on_time() + out.retrieval_window;
        if !gap_ok && c0 < retrieval_end {
            out.calib_window = (retrieval_end, retrieval_end + width);
            out.acq_window = out.acq_window.max(retrieval_end + width);
        } else if retrieval_end > out.acq_window {
            out.acq_window = retrieval_end;
        }
        out
    }
}
