use alloc::format;

use crate::math;
use crate::waveform::{Unit, Waveform};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseShape {
    #[default]
    Trapezoid,
    Gaussian,
    RaisedCosine,
}

/// Periodic perturbation riding on a constant pre-bias.
///
/// `amplitude` is the excursion seen at the constant-current node (positive
/// for a pulse that raises the output current). A perturbation quoted as
/// negative at the injection node maps to `amplitude = -value`.
///
/// Each period begins at `delay`. Trapezoid and raised-cosine pulses ramp over
/// a full edge duration derived from the 10-90 % `edge_time`, so the half-level
/// crossings sit half a ramp after the slot start and `width` later. Gaussian
/// pulses ignore `edge_time` and are centred one `width` after the slot start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StimulusSpec {
    /// Amps.
    pub pre_bias: f64,
    /// Amps.
    pub amplitude: f64,
    /// Seconds, full width at half maximum.
    pub width: f64,
    /// Seconds.
    pub delay: f64,
    /// Seconds, 10-90 % rise of each edge.
    pub edge_time: f64,
    /// Hz.
    pub repetition_rate: f64,
    pub shape: PulseShape,
}

impl Default for StimulusSpec {
    fn default() -> Self {
        StimulusSpec {
            pre_bias: 31e-3,
            amplitude: 10.5e-3,
            width: 600e-12,
            delay: 2e-9,
            edge_time: 100e-12,
            repetition_rate: 100e3,
            shape: PulseShape::Trapezoid,
        }
    }
}

// 10-90 % fraction of a half-cosine ramp.
fn raised_cosine_fraction() -> f64 {
    (math::acos(-0.8) - math::acos(0.8)) / core::f64::consts::PI
}

impl StimulusSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::UnresolvableShape(msg));
        if !self.pre_bias.is_finite() || !self.amplitude.is_finite() {
            return bad(format!("pre_bias {} / amplitude {} must be finite", self.pre_bias, self.amplitude));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return bad(format!("width {} must be positive", self.width));
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return bad(format!("delay {} must be non-negative", self.delay));
        }
        if !(self.repetition_rate > 0.0 && self.repetition_rate.is_finite()) {
            return bad(format!("repetition rate {} must be positive", self.repetition_rate));
        }
        if self.shape != PulseShape::Gaussian {
            if !(self.edge_time > 0.0 && self.edge_time.is_finite()) {
                return bad(format!("edge time {} must be positive", self.edge_time));
            }
            if self.ramp() > self.width {
                return bad(format!(
                    "edges ({:e} s full ramp) exceed the width {:e} s",
                    self.ramp(),
                    self.width
                ));
            }
        }
        if self.repetition_rate * self.slot() >= 1.0 {
            return bad(format!(
                "pulse slot {:e} s does not fit in the period {:e} s",
                self.slot(),
                1.0 / self.repetition_rate
            ));
        }
        Ok(())
    }

    /// Full 0-100 % duration of one edge.
    pub fn ramp(&self) -> f64 {
        match self.shape {
            PulseShape::Trapezoid => self.edge_time / 0.8,
            PulseShape::RaisedCosine => self.edge_time / raised_cosine_fraction(),
            PulseShape::Gaussian => self.width,
        }
    }

    /// Duration occupied by one pulse.
    pub fn slot(&self) -> f64 {
        self.width + self.ramp()
    }

    pub fn period(&self) -> f64 {
        1.0 / self.repetition_rate
    }

    /// Centre of the first pulse.
    pub fn center(&self) -> f64 {
        self.delay + 0.5 * self.slot()
    }

    /// Perturbation current at `t`, excluding the pre-bias. Zero before `delay`.
    pub fn perturbation_at(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let period = self.period();
        let a = self.amplitude;
        match self.shape {
            PulseShape::Gaussian => {
                let k = math::round((t - self.center()) / period).max(0.0);
                let u = t - self.center() - k * period;
                a * math::exp(-4.0 * core::f64::consts::LN_2 * u * u / (self.width * self.width))
            }
            PulseShape::Trapezoid | PulseShape::RaisedCosine => {
                let x = t - self.delay;
                if x < 0.0 {
                    return 0.0;
                }
                let k = math::floor(x / period);
                let u = x - k * period;
                let r = self.ramp();
                let edge = |s: f64| match self.shape {
                    PulseShape::RaisedCosine => 0.5 * (1.0 - math::cos(core::f64::consts::PI * s)),
                    _ => s,
                };
                if u < r {
                    a * edge(u / r)
                } else if u <= self.width {
                    a
                } else if u < self.width + r {
                    a * edge((self.width + r - u) / r)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Samples the perturbation (zero baseline) on `n` points from `t0` with step `dt`.
pub fn stimulus(spec: &StimulusSpec, t0: f64, dt: f64, n: usize) -> Result<Waveform> {
    spec.validate()?;
    Waveform::from_fn(t0, dt, n, Unit::Ampere, |t| spec.perturbation_at(t))
}
