//! Circuit element kinds carried by network branches.
//!
//! Orientation convention for every branch `start -> end`: the branch current
//! is positive when it flows from `start` to `end` through the element, and the
//! branch voltage is `V(start) - V(end)`. Sources push their value from `start`
//! to `end` (a current source `gnd -> a` injects into `a`; a voltage source
//! `gnd -> a` raises `a` above `gnd`).

use alloc::format;
use alloc::string::String;

use crate::sim::StimulusSpec;
use crate::waveform::Waveform;

/// Time dependence of an independent source.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Constant(f64),
    /// Linear interpolation between samples, held outside the span.
    Sampled(Waveform),
    /// Shaped pulse train evaluated in closed form; `pre_bias` is not included.
    Pulse(StimulusSpec),
}

impl Source {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Source::Constant(v) => *v,
            Source::Sampled(w) => w.value_at(t),
            Source::Pulse(spec) => spec.perturbation_at(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Resistor(f64),
    /// Resistance of any sign, zero included. Reserved for the laser fragment's
    /// spontaneous-emission and relaxation-oscillation terms.
    SignedResistor(f64),
    Inductor(f64),
    Capacitor(f64),
    CurrentSource(Source),
    VoltageSource(Source),
}

impl ElementKind {
    pub fn is_source(&self) -> bool {
        matches!(self, ElementKind::CurrentSource(_) | ElementKind::VoltageSource(_))
    }

    /// Short mnemonic used in netlists and diagnostics.
    pub fn mnemonic(&self) -> &'static str {
        match self {
            ElementKind::Resistor(_) => "R",
            ElementKind::SignedResistor(_) => "RS",
            ElementKind::Inductor(_) => "L",
            ElementKind::Capacitor(_) => "C",
            ElementKind::CurrentSource(_) => "I",
            ElementKind::VoltageSource(_) => "V",
        }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} value {v} must be positive and finite"))
            }
        };
        match self {
            ElementKind::Resistor(r) => positive("resistor", *r),
            ElementKind::Inductor(l) => positive("inductor", *l),
            ElementKind::Capacitor(c) => positive("capacitor", *c),
            ElementKind::SignedResistor(r) => {
                if r.is_finite() {
                    Ok(())
                } else {
                    Err(format!("signed resistor value {r} must be finite"))
                }
            }
            ElementKind::CurrentSource(Source::Constant(v))
            | ElementKind::VoltageSource(Source::Constant(v)) => {
                if v.is_finite() {
                    Ok(())
                } else {
                    Err(format!("source value {v} must be finite"))
                }
            }
            ElementKind::CurrentSource(_) | ElementKind::VoltageSource(_) => Ok(()),
        }
    }
}
