//! Circuit topology, laser-diode equivalent circuits, transient simulation and
//! pulse metrology for pre-biased sub-nanosecond current pulse generators.
//!
//! The crate is `no_std` (with `alloc`). File formats, configuration and the
//! command-line surface live in the `pulsenet` crate.
//!
//! Module map:
//! - [`topology`]: networks as chain complexes (boundary matrix, cycle space, KCL).
//! - [`laser`]: rate-equation parameters to equivalent-circuit element values and back.
//! - [`sim`]: stimulus shaping, driver network assembly, MNA transient analysis,
//!   parameter sweeps and the detector bandwidth filter.
//! - [`metrics`]: baseline subtraction, FWHM, level-crossing delay, normalization.
//! - [`stats`]: empirical CDFs and the two-sample Kolmogorov-Smirnov test.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod linalg;
mod math;

pub mod element;
pub mod laser;
pub mod metrics;
pub mod sim;
pub mod stats;
pub mod topology;
pub mod waveform;

pub use element::{ElementKind, Source};
pub use error::{Error, Result};
pub use waveform::{Unit, Waveform};
