//! Pulse metrology on sampled waveforms.
//!
//! All sub-sample positions come from linear interpolation between the two
//! bracketing samples.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Side;
use crate::waveform::Waveform;
use crate::{Error, Result};

const MIN_WINDOW_SAMPLES: usize = 8;

/// Result of [`baseline_subtract`].
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineCorrected {
    pub waveform: Waveform,
    /// Mean removed from every sample.
    pub offset: f64,
    /// Set when the window variance exceeds ten times that of the adjacent
    /// window of equal length, which usually means the window overlaps the pulse.
    pub suspicious_window: bool,
}

/// Subtracts the mean over `window = (t_start, t_end)` from every sample.
pub fn baseline_subtract(w: &Waveform, window: (f64, f64)) -> Result<BaselineCorrected> {
    let (start, end) = window;
    let eps = 1e-9 * w.dt();
    let out_of_span = Error::WindowOutOfSpan { start, end };
    if !(start >= w.t0() - eps && end <= w.t_end() + eps) {
        return Err(out_of_span);
    }
    let (first, last) = w.index_range(start, end).ok_or(out_of_span.clone())?;
    let count = last - first + 1;
    if count < MIN_WINDOW_SAMPLES {
        return Err(out_of_span);
    }
    let s = w.samples();
    let (offset, var) = mean_var(&s[first..=last]);

    let adjacent = if last + count < s.len() {
        Some(&s[last + 1..=last + count])
    } else if first >= count {
        Some(&s[first - count..first])
    } else {
        None
    };
    let suspicious_window = adjacent.is_some_and(|adj| var > 10.0 * mean_var(adj).1);

    Ok(BaselineCorrected { waveform: w.map(|v| v - offset)?, offset, suspicious_window })
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let rough = xs.iter().sum::<f64>() / n;
    let mean = rough + xs.iter().map(|x| x - rough).sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseMetrics {
    pub baseline: f64,
    /// Absolute peak value (baseline included).
    pub peak: f64,
    /// Peak height above the baseline.
    pub amplitude: f64,
    pub t_peak: f64,
    pub fwhm: f64,
    /// Half-maximum crossing times `(rising, falling)`.
    pub half_crossings: (f64, f64),
    /// Another sample elsewhere matches the peak value; the earliest peak was used.
    pub tied_peak: bool,
}

impl PulseMetrics {
    /// Midpoint of the half-maximum crossings.
    pub fn center(&self) -> f64 {
        0.5 * (self.half_crossings.0 + self.half_crossings.1)
    }
}

// Crossing positions in fractional sample units, so widths do not depend on t0.
struct Crossings {
    peak_index: usize,
    peak: f64,
    rise: f64,
    fall: f64,
    tied: bool,
}

fn half_crossings(s: &[f64]) -> Result<Crossings> {
    let (mut ip, mut peak) = (0, s[0]);
    for (i, &v) in s.iter().enumerate().skip(1) {
        if v > peak {
            ip = i;
            peak = v;
        }
    }
    if !(peak > 0.0) {
        return Err(Error::ZeroPeak);
    }
    let mut run_end = ip;
    while run_end + 1 < s.len() && s[run_end + 1] == peak {
        run_end += 1;
    }
    let tied = s[run_end + 1..].contains(&peak);
    let half = 0.5 * peak;

    let i = (0..ip)
        .rev()
        .find(|&i| s[i] < half)
        .ok_or(Error::NoCrossing { side: Side::Rising })?;
    let rise = i as f64 + (half - s[i]) / (s[i + 1] - s[i]);

    let k = (run_end + 1..s.len())
        .find(|&k| s[k] < half)
        .ok_or(Error::NoCrossing { side: Side::Falling })?;
    let fall = (k - 1) as f64 + (s[k - 1] - half) / (s[k - 1] - s[k]);

    Ok(Crossings { peak_index: ip, peak, rise, fall, tied })
}

/// Full width at half maximum of a baseline-subtracted pulse.
///
/// The half level is `peak / 2`; crossings are searched outward from the
/// earliest maximum sample, taking the first bracketing pair on each side.
pub fn fwhm(w: &Waveform) -> Result<PulseMetrics> {
    let c = half_crossings(w.samples())?;
    let (t0, dt) = (w.t0(), w.dt());
    Ok(PulseMetrics {
        baseline: 0.0,
        peak: c.peak,
        amplitude: c.peak,
        t_peak: w.time(c.peak_index),
        fwhm: (c.fall - c.rise) * dt,
        half_crossings: (t0 + c.rise * dt, t0 + c.fall * dt),
        tied_peak: c.tied,
    })
}

/// Baseline subtraction over `window` followed by [`fwhm`]; `peak` is reported
/// in the original (unsubtracted) units.
pub fn measure(w: &Waveform, window: (f64, f64)) -> Result<PulseMetrics> {
    let corrected = baseline_subtract(w, window)?;
    let mut m = fwhm(&corrected.waveform)?;
    m.baseline = corrected.offset;
    m.peak = m.amplitude + corrected.offset;
    Ok(m)
}

/// First rising crossing of `level` as `(index, fraction)`.
fn rising_crossing(s: &[f64], level: f64) -> Option<(usize, f64)> {
    s.windows(2)
        .position(|p| p[0] < level && p[1] >= level)
        .map(|j| (j, (level - s[j]) / (s[j + 1] - s[j])))
}

/// `t_cross(w2) - t_cross(w1)` at the first rising crossing of `level` (raw units).
pub fn delay_at_level(w1: &Waveform, w2: &Waveform, level: f64) -> Result<f64> {
    let (j1, f1) = rising_crossing(w1.samples(), level).ok_or(Error::LevelNotCrossed { waveform: 1, level })?;
    let (j2, f2) = rising_crossing(w2.samples(), level).ok_or(Error::LevelNotCrossed { waveform: 2, level })?;
    if w1.dt() == w2.dt() {
        let steps = if j2 >= j1 { (j2 - j1) as f64 } else { -((j1 - j2) as f64) };
        Ok((w2.t0() - w1.t0()) + (steps + (f2 - f1)) * w1.dt())
    } else {
        let t1 = w1.t0() + (j1 as f64 + f1) * w1.dt();
        let t2 = w2.t0() + (j2 as f64 + f2) * w2.dt();
        Ok(t2 - t1)
    }
}

fn normalized(w: &Waveform) -> Result<Waveform> {
    let (_, peak) = w.max();
    if !(peak > 0.0) {
        return Err(Error::ZeroPeak);
    }
    if peak == 1.0 {
        Ok(w.clone())
    } else {
        w.map(|v| v / peak)
    }
}

const ALIGN_MAX_ITERATIONS: usize = 32;

/// Scales both pulses to unit peak and shifts `w2` so that its half-maximum
/// midpoint coincides with that of `w1`.
///
/// Both results live on `w1`'s time grid, restricted to the region covered by
/// both inputs. `w2` is resampled by linear interpolation; the shift is refined
/// until the resampled pulse's own midpoint matches, so the operation is
/// idempotent.
pub fn normalize_align(w1: &Waveform, w2: &Waveform) -> Result<(Waveform, Waveform)> {
    let n1 = normalized(w1)?;
    let n2 = normalized(w2)?;
    let c1 = fwhm(&n1)?.center();
    let mut shift = fwhm(&n2)?.center() - c1;
    let mut aligned = resample_shifted(&n1, &n2, shift)?;
    for _ in 0..ALIGN_MAX_ITERATIONS {
        let err = fwhm(&aligned.1)?.center() - c1;
        if err.abs() <= 1e-12 * n1.dt() {
            break;
        }
        shift += err;
        aligned = resample_shifted(&n1, &n2, shift)?;
    }
    Ok(aligned)
}

// Evaluates `src(t + shift)` on the part of `grid`'s time axis it covers.
fn resample_shifted(grid: &Waveform, src: &Waveform, shift: f64) -> Result<(Waveform, Waveform)> {
    let eps = 1e-9 * src.dt();
    let (lo, hi) = (src.t0() - shift - eps, src.t_end() - shift + eps);
    let (first, last) = grid
        .index_range(lo, hi)
        .filter(|(f, l)| l > f)
        .ok_or_else(|| Error::InvalidWaveform(format!("pulses do not overlap after a {shift:e} s shift")))?;
    let values: Vec<f64> = (first..=last).map(|i| src.value_at(grid.time(i) + shift)).collect();
    let moved = Waveform::new(grid.time(first), grid.dt(), values, src.unit())?;
    Ok((grid.slice(first, last)?, normalized(&moved)?))
}

/// Zeroes every sample outside `[center - half_window, center + half_window]`.
pub fn suppress_outside(w: &Waveform, center: f64, half_window: f64) -> Result<Waveform> {
    let (lo, hi) = (center - half_window, center + half_window);
    let samples = w
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let t = w.time(i);
            if t < lo || t > hi {
                0.0
            } else {
                v
            }
        })
        .collect();
    Waveform::new(w.t0(), w.dt(), samples, w.unit())
}
