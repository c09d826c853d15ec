use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Which side of a pulse peak a half-maximum search ran on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rising,
    Falling,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Network construction rejected (bad endpoint, duplicate id, bad element value).
    InvalidNetwork(String),
    /// A per-branch or per-sample vector had the wrong length.
    LengthMismatch { expected: usize, got: usize },
    InvalidWaveform(String),
    /// A scalar input violated its domain (non-positive temperature, beta outside [0, 1), ...).
    InvalidParameter { name: &'static str, reason: String },
    /// The equivalent-circuit model divides by the photon density.
    SingularModel { n_photon: f64 },
    /// Circuit values that no physical parameter set maps to.
    NonPhysical(String),
    /// Stimulus edges do not fit inside the requested width or period.
    UnresolvableShape(String),
    /// The MNA matrix is singular. Carries the nodes without a DC path to the reference.
    SingularSystem { floating: Vec<String> },
    NoReference,
    NoSource,
    /// The per-step KCL residual exceeded `solver_tol * max|I|`.
    StepRejected { step: usize, residual: f64, bound: f64 },
    /// A half-maximum crossing was not found (clipped pulse).
    NoCrossing { side: Side },
    /// A level was never crossed on a rising edge. `waveform` is 1 or 2.
    LevelNotCrossed { waveform: u8, level: f64 },
    WindowOutOfSpan { start: f64, end: f64 },
    ZeroPeak,
    EmptySample,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidNetwork(msg) => write!(f, "invalid network: {msg}"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::InvalidWaveform(msg) => write!(f, "invalid waveform: {msg}"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::SingularModel { n_photon } => write!(
                f,
                "equivalent-circuit model is singular at n_photon = {n_photon:e} (below-threshold operation)"
            ),
            Error::NonPhysical(msg) => write!(f, "non-physical circuit values: {msg}"),
            Error::UnresolvableShape(msg) => write!(f, "unresolvable stimulus shape: {msg}"),
            Error::SingularSystem { floating } => {
                if floating.is_empty() {
                    write!(f, "singular circuit matrix")
                } else {
                    write!(f, "singular circuit matrix; nodes without a DC path to the reference: ")?;
                    for (i, n) in floating.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        f.write_str(n)?;
                    }
                    Ok(())
                }
            }
            Error::NoReference => write!(f, "network has no reference (ground) node"),
            Error::NoSource => write!(f, "network has no independent source"),
            Error::StepRejected { step, residual, bound } => write!(
                f,
                "step {step} rejected: KCL residual {residual:e} exceeds bound {bound:e}"
            ),
            Error::NoCrossing { side } => {
                let side = match side {
                    Side::Rising => "rising",
                    Side::Falling => "falling",
                };
                write!(f, "no half-maximum crossing on the {side} side of the peak (clipped pulse?)")
            }
            Error::LevelNotCrossed { waveform, level } => {
                write!(f, "waveform {waveform} never crosses level {level} on a rising edge")
            }
            Error::WindowOutOfSpan { start, end } => {
                write!(f, "window [{start:e}, {end:e}] lies outside the waveform span or holds fewer than 8 samples")
            }
            Error::ZeroPeak => write!(f, "waveform peak is not positive"),
            Error::EmptySample => write!(f, "sample is empty"),
        }
    }
}

impl core::error::Error for Error {}
