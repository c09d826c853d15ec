//! Two-sample Kolmogorov-Smirnov testing of pulse shapes.

use alloc::vec::Vec;

use crate::math;
use crate::metrics::{fwhm, normalize_align};
use crate::waveform::Waveform;
use crate::{Error, Result};

/// Right-continuous empirical CDF over a sorted copy of the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.sorted.partition_point(|&v| v <= x);
        k as f64 / self.sorted.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub d_stat: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub effective_n: f64,
    pub lambda: f64,
    pub same_distribution: bool,
}

/// Below this the alternating series cancels badly and the theta form is used.
const THETA_CROSSOVER: f64 = 1.18;

/// Asymptotic Kolmogorov survival function
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²)`, clamped to `[0, 1]`.
///
/// For small `λ` the equivalent form
/// `1 - (√(2π)/λ) Σ_{k≥1} exp(-(2k-1)² π² / (8 λ²))` is summed instead.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    // Below 1e-3 the distance from 1 is far under one ulp.
    if lambda.is_nan() || lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    if lambda < THETA_CROSSOVER {
        let pi = core::f64::consts::PI;
        for k in 1u64.. {
            let j = (2 * k - 1) as f64;
            let term = math::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
            sum += term;
            if term < 1e-12 * sum || term == 0.0 {
                break;
            }
        }
        return (1.0 - math::sqrt(2.0 * pi) / lambda * sum).clamp(0.0, 1.0);
    }
    let mut sign = 1.0;
    for k in 1u64.. {
        let kf = k as f64;
        let term = math::exp(-2.0 * kf * kf * lambda * lambda);
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Sup distance between the two empirical CDFs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    let fa = EmpiricalCdf::new(a)?;
    let fb = EmpiricalCdf::new(b)?;
    let (xs, ys) = (fa.sorted(), fb.sorted());
    let (m, n) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < m && j < n {
        let x = if xs[i] <= ys[j] { xs[i] } else { ys[j] };
        while i < m && xs[i] <= x {
            i += 1;
        }
        while j < n && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / m as f64 - j as f64 / n as f64).abs());
    }
    Ok(d)
}

/// Two-sample test at significance `alpha`; `same_distribution` iff `p > alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: alloc::format!("{alpha} must lie in (0, 1)"),
        });
    }
    let d_stat = ks_statistic(a, b)?;
    let (m, n) = (a.len() as f64, b.len() as f64);
    let effective_n = m * n / (m + n);
    let lambda = d_stat * math::sqrt(effective_n);
    let p_value = kolmogorov_q(lambda);
    Ok(KsResult { d_stat, p_value, alpha, effective_n, lambda, same_distribution: p_value > alpha })
}

/// How pulse samples are turned into CDF populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfWindow {
    /// Half-width of the sampling window in FWHMs.
    pub window_mult: f64,
    /// Amplitude step the normalized samples are rounded to, as a digitizer
    /// would; 0 keeps full precision.
    pub quantum: f64,
}

impl Default for CdfWindow {
    fn default() -> Self {
        CdfWindow { window_mult: 3.0, quantum: 1e-6 }
    }
}

/// Normalizes and aligns two pulses, then returns their quantized samples inside
/// `±window_mult` FWHMs of the common center, as the two CDF populations.
pub fn waveform_samples_for_cdf(w1: &Waveform, w2: &Waveform, opts: CdfWindow) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(opts.window_mult > 0.0 && opts.window_mult.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "window_mult",
            reason: alloc::format!("{} must be positive", opts.window_mult),
        });
    }
    if !(opts.quantum >= 0.0 && opts.quantum < 1.0) {
        return Err(Error::InvalidParameter {
            name: "quantum",
            reason: alloc::format!("{} must lie in [0, 1)", opts.quantum),
        });
    }
    let (a, b) = normalize_align(w1, w2)?;
    let m = fwhm(&a)?;
    let half = opts.window_mult * m.fwhm;
    let (first, last) = a.index_range(m.center() - half, m.center() + half).ok_or(Error::EmptySample)?;
    let q = opts.quantum;
    let pick = |w: &Waveform| -> Vec<f64> {
        w.samples()[first..=last].iter().map(|&v| if q > 0.0 { math::round(v / q) * q } else { v }).collect()
    };
    Ok((pick(&a), pick(&b)))
}
