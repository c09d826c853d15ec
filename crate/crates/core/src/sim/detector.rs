use alloc::format;

use crate::math;
use crate::waveform::Waveform;
use crate::{Error, Result};

/// Single-pole low-pass emulating a bandwidth-limited photodetector or probe.
///
/// The time constant is `rise_time / ln 9`, so a step through the filter rises
/// 10-90 % in `rise_time`. The recursion uses the exact exponential decay per
/// sample and starts in steady state at the first sample.
pub fn detector_filter(w: &Waveform, rise_time: f64) -> Result<Waveform> {
    if !(rise_time > 0.0 && rise_time.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rise_time",
            reason: format!("{rise_time} must be positive"),
        });
    }
    let tau = rise_time / math::ln(9.0);
    let gain = 1.0 - math::exp(-w.dt() / tau);
    let mut y = w.samples()[0];
    let samples = w
        .samples()
        .iter()
        .map(|&x| {
            y += gain * (x - y);
            y
        })
        .collect();
    Waveform::new(w.t0(), w.dt(), samples, w.unit())
}
