//! Config schemas of the subcommands and their conversion to core types.

use pulsenet_core::laser::{CalibrationAssumptions, LaserCircuit, LaserPhysics};
use pulsenet_core::sim::{BiasTee, DriverOptions, FilterStage, Method, SimConfig, StimulusSpec};

use crate::config::{key, Config, ConfigError, Key, Kind};
use crate::netlist::parse_shape;
use crate::quantity::Dimension::{self, *};

const fn q(name: &'static str, d: Dimension) -> Key {
    key(name, Kind::Quantity(d))
}

pub const LASER_PHYSICS: &[Key] = &[
    q("T", Kelvin),
    q("I_d", Ampere),
    q("n_photon", Dimensionless),
    q("tau_photon", Second),
    q("tau_spon", Second),
    q("beta", Dimensionless),
    q("n_e", Dimensionless),
    q("n_sat", Dimensionless),
    q("delta", Dimensionless),
];

pub const LASER_CIRCUIT: &[Key] = &[
    q("T", Kelvin),
    q("I_d", Ampere),
    q("n_e", Dimensionless),
    q("n_sat", Dimensionless),
    q("R", Ohm),
    q("L", Henry),
    q("C", Farad),
    q("R_spon", Ohm),
    q("R_o", Ohm),
];

/// Keys accepted by `simulate` and `sweep`.
pub const SIMULATION: &[Key] = &[
    q("pre_bias", Ampere),
    q("amplitude", Ampere),
    q("width", Second),
    q("delay", Second),
    q("edge_time", Second),
    q("repetition_rate", Hertz),
    key("shape", Kind::Word),
    q("t_end", Second),
    q("dt", Second),
    key("method", Kind::Word),
    q("solver_tol", Dimensionless),
    q("laser_R", Ohm),
    q("laser_L", Henry),
    q("laser_C", Farad),
    q("laser_R_spon", Ohm),
    q("laser_R_o", Ohm),
    q("bias_tee_C", Farad),
    q("bias_tee_L", Henry),
    q("leak_R", Ohm),
    q("sense_R", Ohm),
    q("parasitic_L", Henry),
    q("filter_R", Ohm),
    q("filter_C", Farad),
    q("detector_rise", Second),
    key("netlist", Kind::Path),
    key("probes", Kind::Word),
];

pub fn laser_physics(c: &Config) -> Result<LaserPhysics, ConfigError> {
    Ok(LaserPhysics {
        temperature: c.require("T")?,
        bias_current: c.require("I_d")?,
        n_photon: c.require("n_photon")?,
        tau_photon: c.require("tau_photon")?,
        tau_spon: c.require("tau_spon")?,
        beta: c.require("beta")?,
        n_e: c.require("n_e")?,
        n_sat: c.require("n_sat")?,
        delta: c.require("delta")?,
    })
}

/// Circuit values plus the operating point and assumed densities for inversion.
pub fn laser_circuit_inversion(c: &Config) -> Result<(LaserCircuit, f64, f64, CalibrationAssumptions), ConfigError> {
    let circuit = LaserCircuit {
        r: c.require("R")?,
        l: c.require("L")?,
        c: c.require("C")?,
        r_spon: c.require("R_spon")?,
        r_o: c.require("R_o")?,
    };
    let assumed = CalibrationAssumptions { n_e: c.require("n_e")?, n_sat: c.require("n_sat")? };
    Ok((circuit, c.require("T")?, c.require("I_d")?, assumed))
}

pub fn stimulus(c: &Config) -> Result<StimulusSpec, ConfigError> {
    let d = StimulusSpec::default();
    let shape = match c.word("shape") {
        None => d.shape,
        Some(w) => parse_shape(w)
            .ok_or_else(|| ConfigError::Invalid { key: "shape", message: format!("unknown shape `{w}`") })?,
    };
    Ok(StimulusSpec {
        pre_bias: c.number_or("pre_bias", d.pre_bias),
        amplitude: c.number_or("amplitude", d.amplitude),
        width: c.number_or("width", d.width),
        delay: c.number_or("delay", d.delay),
        edge_time: c.number_or("edge_time", d.edge_time),
        repetition_rate: c.number_or("repetition_rate", d.repetition_rate),
        shape,
    })
}

pub fn sim_config(c: &Config) -> Result<SimConfig, ConfigError> {
    let d = SimConfig::default();
    let method = match c.word("method") {
        None => d.method,
        Some("trapezoidal") => Method::Trapezoidal,
        Some("backward-euler") | Some("backward_euler") => Method::BackwardEuler,
        Some(w) => return Err(ConfigError::Invalid { key: "method", message: format!("unknown method `{w}`") }),
    };
    Ok(SimConfig {
        t_end: c.number_or("t_end", d.t_end),
        dt: c.number_or("dt", d.dt),
        method,
        solver_tol: c.number_or("solver_tol", d.solver_tol),
    })
}

pub fn laser_circuit(c: &Config) -> Result<LaserCircuit, ConfigError> {
    Ok(LaserCircuit {
        r: c.require("laser_R")?,
        l: c.require("laser_L")?,
        c: c.require("laser_C")?,
        r_spon: c.require("laser_R_spon")?,
        r_o: c.require("laser_R_o")?,
    })
}

pub fn driver_options(c: &Config) -> Result<DriverOptions, ConfigError> {
    let d = DriverOptions::default();
    let filter = match (c.number("filter_R"), c.number("filter_C")) {
        (Some(r), Some(cap)) => Some(FilterStage { r, c: cap }),
        (None, None) => None,
        (Some(_), None) => return Err(ConfigError::Missing("filter_C")),
        (None, Some(_)) => return Err(ConfigError::Missing("filter_R")),
    };
    Ok(DriverOptions {
        bias_tee: BiasTee {
            coupling_c: c.number_or("bias_tee_C", d.bias_tee.coupling_c),
            shunt_l: c.number_or("bias_tee_L", d.bias_tee.shunt_l),
            leak_r: c.number_or("leak_R", d.bias_tee.leak_r),
        },
        sense_r: c.number_or("sense_R", d.sense_r),
        parasitic_l: c.number_or("parasitic_L", d.parasitic_l),
        filter,
    })
}
