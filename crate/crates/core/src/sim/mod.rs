//! Transient simulation of the pulse driver.

mod detector;
mod driver;
mod mna;
mod stimulus;

pub use detector::detector_filter;
pub use driver::{
    driver_network, driver_network_with, quiet_window, simulate_and_measure, sweep, sweep_point, BiasTee,
    DriverNetwork, DriverOptions, FilterStage, SweepParameter, SweepRow, ALPHA, BETA, DELTA, FILTER_NODE,
    GROUND, LASER_PREFIX, PARASITIC_NODE, PSI,
};
pub use mna::{transient, Method, SimConfig, SimResult};
pub use stimulus::{stimulus, PulseShape, StimulusSpec};
