//! Uniformly sampled time series.

use alloc::format;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Sample-index distance below which `value_at` returns the sample itself.
const GRID_SNAP: f64 = 1e-9;

/// Physical unit carried alongside waveform samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unit {
    Ampere,
    Volt,
    #[default]
    Dimensionless,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Ampere => "A",
            Unit::Volt => "V",
            Unit::Dimensionless => "1",
        }
    }
}

/// Samples `samples[i]` taken at `t0 + i * dt`.
///
/// Invariants: `dt > 0`, at least two samples, all samples finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    t0: f64,
    dt: f64,
    samples: Vec<f64>,
    unit: Unit,
}

impl Waveform {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>, unit: Unit) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidWaveform(format!("t0 = {t0} is not finite")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidWaveform(format!("dt = {dt} must be positive")));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidWaveform(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidWaveform(format!("sample {i} is not finite")));
        }
        Ok(Waveform { t0, dt, samples, unit })
    }

    /// Samples `f` on `n` points starting at `t0`.
    pub fn from_fn(t0: f64, dt: f64, n: usize, unit: Unit, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..n).map(|i| f(t0 + i as f64 * dt)).collect();
        Waveform::new(t0, dt, samples, unit)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    /// Applies `f` to every sample. The result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Waveform> {
        Waveform::new(self.t0, self.dt, self.samples.iter().map(|&v| f(v)).collect(), self.unit)
    }

    pub fn scale(&self, factor: f64) -> Result<Waveform> {
        self.map(|v| v * factor)
    }

    /// Same samples on a grid shifted by `offset` seconds.
    pub fn shifted(&self, offset: f64) -> Waveform {
        Waveform { t0: self.t0 + offset, ..self.clone() }
    }

    /// Linear interpolation at `t`; values outside the span are held at the end samples.
    pub fn value_at(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        let last = self.samples.len() - 1;
        if x <= 0.0 {
            return self.samples[0];
        }
        if x >= last as f64 {
            return self.samples[last];
        }
        let nearest = math::round(x);
        if (x - nearest).abs() <= GRID_SNAP {
            return self.samples[nearest as usize];
        }
        let i = math::floor(x) as usize;
        let frac = x - i as f64;
        self.samples[i] + frac * (self.samples[i + 1] - self.samples[i])
    }

    /// Index range `[first, last]` of samples whose times lie inside `[start, end]`.
    pub fn index_range(&self, start: f64, end: f64) -> Option<(usize, usize)> {
        if !(start <= end) {
            return None;
        }
        let last = self.samples.len() - 1;
        let lo = math::ceil((start - self.t0) / self.dt - 1e-9).max(0.0);
        let hi = math::floor((end - self.t0) / self.dt + 1e-9);
        if hi < 0.0 {
            return None;
        }
        let first = lo as usize;
        let last_in = (hi as usize).min(last);
        if first > last_in {
            None
        } else {
            Some((first, last_in))
        }
    }

    /// Sub-waveform restricted to `[first, last]` (inclusive).
    pub fn slice(&self, first: usize, last: usize) -> Result<Waveform> {
        if last >= self.samples.len() || first > last {
            return Err(Error::InvalidWaveform(format!(
                "slice [{first}, {last}] outside 0..{}",
                self.samples.len()
            )));
        }
        Waveform::new(self.time(first), self.dt, self.samples[first..=last].to_vec(), self.unit)
    }

    pub fn max(&self) -> (usize, f64) {
        let mut best = (0, self.samples[0]);
        for (i, &v) in self.samples.iter().enumerate().skip(1) {
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}
