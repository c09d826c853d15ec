//! Pre-biased pulse driver: constant excitation at `alpha`, shaped
//! perturbation at `beta` coupled through a bias tee into the constant-current
//! node `delta`, and the laser diode at the output node `psi`.
//!
//! ```text
//!  gnd --I_alpha--> alpha --L_bt--> delta --R_sense--> psi [--R_filt--> filt] --laser--> gnd
//!  gnd --I_beta---> beta  --C_bt--> delta                   [ filt --C_filt--> gnd ]
//!                   beta  --R_leak--> gnd
//! ```

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::element::{ElementKind, Source};
use crate::laser::{append_equivalent, FragmentLabels, LaserCircuit};
use crate::metrics::{measure, PulseMetrics};
use crate::sim::mna::{transient, SimConfig, SimResult};
use crate::sim::stimulus::StimulusSpec;
use crate::topology::{Network, NetworkBuilder};
use crate::waveform::{Unit, Waveform};
use crate::{Error, Result};

pub const GROUND: &str = "gnd";
pub const ALPHA: &str = "alpha";
pub const BETA: &str = "beta";
pub const DELTA: &str = "delta";
pub const PSI: &str = "psi";
pub const FILTER_NODE: &str = "filt";
pub const PARASITIC_NODE: &str = "par";
pub const LASER_PREFIX: &str = "laser.";

const MIN_BASELINE_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasTee {
    /// Series coupling capacitor on the perturbation path, farads.
    pub coupling_c: f64,
    /// Inductor carrying the constant excitation into `delta`, henries.
    pub shunt_l: f64,
    /// DC return of the perturbation node, ohms.
    pub leak_r: f64,
}

impl Default for BiasTee {
    fn default() -> Self {
        BiasTee { coupling_c: 100e-9, shunt_l: 1e-6, leak_r: 100e6 }
    }
}

/// Series resistor followed by a shunt capacitor in front of the laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterStage {
    pub r: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverOptions {
    pub bias_tee: BiasTee,
    /// Current-sense resistor between `delta` and `psi`, ohms.
    pub sense_r: f64,
    /// Board inductance in series with the sense resistor; 0 disables it.
    pub parasitic_l: f64,
    pub filter: Option<FilterStage>,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions { bias_tee: BiasTee::default(), sense_r: 1.0, parasitic_l: 0.0, filter: None }
    }
}

/// A built driver network with the labels needed to probe it.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverNetwork {
    pub network: Network,
    pub laser: FragmentLabels,
    /// Node the laser anode is attached to.
    pub laser_anode: String,
    /// Branch carrying the total current into `psi`.
    pub output_branch: String,
}

pub fn driver_network(spec: &StimulusSpec, laser: &LaserCircuit, filter: Option<FilterStage>) -> Result<DriverNetwork> {
    driver_network_with(spec, laser, &DriverOptions { filter, ..DriverOptions::default() })
}

pub fn driver_network_with(spec: &StimulusSpec, laser: &LaserCircuit, opts: &DriverOptions) -> Result<DriverNetwork> {
    spec.validate()?;
    laser.validate()?;
    let mut b = NetworkBuilder::new();
    b.reference(GROUND);
    b.branch("I_alpha", GROUND, ALPHA, ElementKind::CurrentSource(Source::Constant(spec.pre_bias)))
        .branch("I_beta", GROUND, BETA, ElementKind::CurrentSource(Source::Pulse(*spec)))
        .branch("R_leak", BETA, GROUND, ElementKind::Resistor(opts.bias_tee.leak_r))
        .branch("C_bt", BETA, DELTA, ElementKind::Capacitor(opts.bias_tee.coupling_c))
        .branch("L_bt", ALPHA, DELTA, ElementKind::Inductor(opts.bias_tee.shunt_l));
    if opts.parasitic_l > 0.0 {
        b.branch("R_sense", DELTA, PARASITIC_NODE, ElementKind::Resistor(opts.sense_r))
            .branch("L_par", PARASITIC_NODE, PSI, ElementKind::Inductor(opts.parasitic_l));
    } else {
        b.branch("R_sense", DELTA, PSI, ElementKind::Resistor(opts.sense_r));
    }
    let anode = match opts.filter {
        Some(f) => {
            b.branch("R_filt", PSI, FILTER_NODE, ElementKind::Resistor(f.r))
                .branch("C_filt", FILTER_NODE, GROUND, ElementKind::Capacitor(f.c));
            FILTER_NODE
        }
        None => PSI,
    };
    let labels = append_equivalent(&mut b, laser, GROUND, anode, LASER_PREFIX);
    let output_branch = if opts.parasitic_l > 0.0 { "L_par" } else { "R_sense" };
    Ok(DriverNetwork {
        network: b.build()?,
        laser: labels,
        laser_anode: String::from(anode),
        output_branch: String::from(output_branch),
    })
}

fn probe<'a>(r: &'a SimResult, id: &str) -> Result<&'a Waveform> {
    r.branch_current(id)
        .ok_or_else(|| Error::InvalidNetwork(format!("result has no branch `{id}`")))
}

impl DriverNetwork {
    /// Terminal current into the laser diode (capacitor plus series chain).
    pub fn laser_current(&self, r: &SimResult) -> Result<Waveform> {
        let c = probe(r, &self.laser.cap)?;
        let chain = probe(r, &self.laser.r)?;
        let samples = c.samples().iter().zip(chain.samples()).map(|(a, b)| a + b).collect();
        Waveform::new(c.t0(), c.dt(), samples, Unit::Ampere)
    }

    /// Current through the photon inductance, used as the optical-output proxy.
    pub fn optical_current(&self, r: &SimResult) -> Result<Waveform> {
        probe(r, &self.laser.l).cloned()
    }

    /// Total current delivered into `psi`.
    pub fn output_current(&self, r: &SimResult) -> Result<Waveform> {
        probe(r, &self.output_branch).cloned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Delay,
    Amplitude,
    Width,
}

impl SweepParameter {
    pub fn apply(self, base: &StimulusSpec, value: f64) -> StimulusSpec {
        let mut s = *base;
        match self {
            SweepParameter::Delay => s.delay = value,
            SweepParameter::Amplitude => s.amplitude = value,
            SweepParameter::Width => s.width = value,
        }
        s
    }
}

/// One row of a sweep: laser-current pulse metrics for one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Amps, baseline included.
    pub peak: f64,
    pub fwhm: f64,
    pub t_peak: f64,
    pub metrics: PulseMetrics,
}

/// Baseline window: the stretch before the first pulse when it holds at least
/// eight samples (the trace starts at the DC operating point), otherwise the
/// longest stimulus-free stretch of the trace.
pub fn quiet_window(spec: &StimulusSpec, t_end: f64, dt: f64) -> Option<(f64, f64)> {
    let n = (t_end / dt) as usize + 1;
    let tol = 1e-9 * spec.amplitude.abs();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = None;
    for i in 0..=n {
        let quiet = i < n && spec.perturbation_at(i as f64 * dt).abs() <= tol;
        match (quiet, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    let long_enough = |&(a, b): &(usize, usize)| b - a + 1 >= MIN_BASELINE_SAMPLES;
    let leading = runs.first().copied().filter(|r| r.0 == 0 && r.1 + 1 < n).filter(long_enough);
    leading
        .or_else(|| runs.iter().copied().filter(long_enough).max_by_key(|(a, b)| (b - a, usize::MAX - a)))
        .map(|(a, b)| (a as f64 * dt, b as f64 * dt))
}

/// Simulates the driver for one stimulus and measures the laser-current pulse.
pub fn simulate_and_measure(
    spec: &StimulusSpec,
    laser: &LaserCircuit,
    opts: &DriverOptions,
    cfg: &SimConfig,
) -> Result<(DriverNetwork, SimResult, PulseMetrics)> {
    let drv = driver_network_with(spec, laser, opts)?;
    let result = transient(&drv.network, cfg)?;
    let current = drv.laser_current(&result)?;
    let window = quiet_window(spec, current.t_end(), cfg.dt).ok_or_else(|| Error::InvalidParameter {
        name: "t_end",
        reason: String::from("trace has no pulse-free interval for the baseline"),
    })?;
    let m = measure(&current, window)?;
    Ok((drv, result, m))
}

pub fn sweep_point(
    base: &StimulusSpec,
    laser: &LaserCircuit,
    opts: &DriverOptions,
    cfg: &SimConfig,
    vary: SweepParameter,
    value: f64,
) -> Result<SweepRow> {
    let spec = vary.apply(base, value);
    let (_, _, m) = simulate_and_measure(&spec, laser, opts, cfg)?;
    Ok(SweepRow { value, peak: m.peak, fwhm: m.fwhm, t_peak: m.t_peak, metrics: m })
}

/// Runs one simulation per value, in order.
pub fn sweep(
    base: &StimulusSpec,
    laser: &LaserCircuit,
    opts: &DriverOptions,
    cfg: &SimConfig,
    vary: SweepParameter,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    values.iter().map(|&v| sweep_point(base, laser, opts, cfg, vary, v)).collect()
}
