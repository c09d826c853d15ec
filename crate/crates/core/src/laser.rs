//! Laser-diode small-signal equivalent circuit derived from single-mode rate equations.
//!
//! Above threshold the diode is a capacitor `C` (carrier relaxation) shunting a
//! series chain of the differential resistance `R`, the photon inductance `L`,
//! the spontaneous-emission resistance `R_spon` and the negative
//! relaxation-oscillation resistance `R_o`. All five values scale with the
//! differential resistance `R_d = (2kT/q) / I_d`.

use alloc::format;
use alloc::string::String;

use crate::element::ElementKind;
use crate::topology::{Network, NetworkBuilder};
use crate::{Error, Result};

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Elementary charge, C (exact SI value).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Photon densities below this are treated as below-threshold operation.
pub const MIN_PHOTON_DENSITY: f64 = 1e-9;

/// `(2kT/q) / I_d` in ohms.
pub fn differential_resistance(temperature: f64, bias_current: f64) -> Result<f64> {
    positive("temperature", temperature)?;
    positive("bias current", bias_current)?;
    Ok(2.0 * BOLTZMANN * temperature / ELEMENTARY_CHARGE / bias_current)
}

/// Rate-equation parameters of a single-mode laser diode at one operating point.
///
/// Densities are normalized and dimensionless. `delta` is the dimensionless
/// gain-compression factor that sets the relaxation-oscillation resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserPhysics {
    /// Kelvin.
    pub temperature: f64,
    /// Amps.
    pub bias_current: f64,
    pub n_photon: f64,
    /// Seconds.
    pub tau_photon: f64,
    /// Seconds.
    pub tau_spon: f64,
    /// Fraction of spontaneous emission coupled into the lasing mode, in `[0, 1)`.
    pub beta: f64,
    pub n_e: f64,
    pub n_sat: f64,
    pub delta: f64,
}

impl LaserPhysics {
    pub fn validate(&self) -> Result<()> {
        positive("temperature", self.temperature)?;
        positive("bias current", self.bias_current)?;
        if !(self.n_photon >= MIN_PHOTON_DENSITY) || !self.n_photon.is_finite() {
            return Err(Error::SingularModel { n_photon: self.n_photon });
        }
        positive("tau_photon", self.tau_photon)?;
        positive("tau_spon", self.tau_spon)?;
        if !(0.0..1.0).contains(&self.beta) {
            return Err(invalid("beta", format!("{} is outside [0, 1)", self.beta)));
        }
        positive("n_e", self.n_e)?;
        positive("n_sat", self.n_sat)?;
        positive("delta", self.delta)?;
        Ok(())
    }

    pub fn differential_resistance(&self) -> Result<f64> {
        differential_resistance(self.temperature, self.bias_current)
    }
}

/// Equivalent-circuit element values: ohms, henries, farads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserCircuit {
    pub r: f64,
    pub l: f64,
    pub c: f64,
    pub r_spon: f64,
    pub r_o: f64,
}

impl LaserCircuit {
    pub fn validate(&self) -> Result<()> {
        positive("R", self.r)?;
        positive("L", self.l)?;
        positive("C", self.c)?;
        if !(self.r_spon >= 0.0 && self.r_spon.is_finite()) {
            return Err(invalid("R_spon", format!("{} must be >= 0", self.r_spon)));
        }
        if !(self.r_o <= 0.0 && self.r_o.is_finite()) {
            return Err(invalid("R_o", format!("{} must be <= 0", self.r_o)));
        }
        if !(self.series_resistance() > 0.0) {
            return Err(invalid(
                "series resistance",
                format!("R + R_spon + R_o = {} must be positive", self.series_resistance()),
            ));
        }
        Ok(())
    }

    /// `R + R_spon + R_o`; positive for a stable diode model.
    pub fn series_resistance(&self) -> f64 {
        self.r + self.r_spon + self.r_o
    }
}

pub fn circuit_from_physics(p: &LaserPhysics) -> Result<LaserCircuit> {
    p.validate()?;
    let rd = p.differential_resistance()?;
    let n = p.n_photon;
    let sat = 1.0 + n / p.n_sat;
    let c = LaserCircuit {
        r: rd / (n + 1.0),
        l: rd * p.tau_photon / n,
        c: p.tau_spon / rd,
        r_spon: p.beta * rd * p.n_e / (n * n),
        r_o: -(rd * p.delta / p.n_sat) / (sat * sat),
    };
    // Strong gain compression can outweigh R + R_spon and leave an unstable model.
    c.validate()?;
    Ok(c)
}

/// Densities that the circuit values cannot determine and must be assumed for calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationAssumptions {
    pub n_e: f64,
    pub n_sat: f64,
}

/// Inverts [`circuit_from_physics`] at the given temperature and bias current.
pub fn physics_from_circuit(
    c: &LaserCircuit,
    temperature: f64,
    bias_current: f64,
    assumed: CalibrationAssumptions,
) -> Result<LaserPhysics> {
    c.validate()?;
    positive("n_e", assumed.n_e)?;
    positive("n_sat", assumed.n_sat)?;
    let rd = differential_resistance(temperature, bias_current)?;
    if rd <= c.r {
        return Err(Error::NonPhysical(format!(
            "R = {} ohm is not below the differential resistance {rd} ohm",
            c.r
        )));
    }
    let n = rd / c.r - 1.0;
    if n < MIN_PHOTON_DENSITY {
        return Err(Error::SingularModel { n_photon: n });
    }
    let sat = 1.0 + n / assumed.n_sat;
    let p = LaserPhysics {
        temperature,
        bias_current,
        n_photon: n,
        tau_photon: c.l * n / rd,
        tau_spon: c.c * rd,
        beta: c.r_spon * n * n / (rd * assumed.n_e),
        n_e: assumed.n_e,
        n_sat: assumed.n_sat,
        delta: -c.r_o * assumed.n_sat * sat * sat / rd,
    };
    p.validate()?;
    Ok(p)
}

/// Internal node and branch labels of an emitted laser fragment.
pub fn fragment_labels(prefix: &str) -> FragmentLabels {
    FragmentLabels {
        cap: format!("{prefix}C"),
        r: format!("{prefix}R"),
        l: format!("{prefix}L"),
        r_spon: format!("{prefix}Rspon"),
        r_o: format!("{prefix}Ro"),
        internal: [format!("{prefix}n1"), format!("{prefix}n2"), format!("{prefix}n3")],
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentLabels {
    pub cap: String,
    pub r: String,
    pub l: String,
    pub r_spon: String,
    pub r_o: String,
    pub internal: [String; 3],
}

/// Adds the diode between `anode` and `cathode` (conventional current anode to
/// cathode): `C` directly across the terminals, `R -> L -> R_spon -> R_o` in
/// series through three internal nodes.
pub fn append_equivalent(
    builder: &mut NetworkBuilder,
    c: &LaserCircuit,
    cathode: &str,
    anode: &str,
    prefix: &str,
) -> FragmentLabels {
    let labels = fragment_labels(prefix);
    let [n1, n2, n3] = &labels.internal;
    builder
        .branch(&labels.cap, anode, cathode, ElementKind::Capacitor(c.c))
        .branch(&labels.r, anode, n1, ElementKind::Resistor(c.r))
        .branch(&labels.l, n1, n2, ElementKind::Inductor(c.l))
        .branch(&labels.r_spon, n2, n3, ElementKind::SignedResistor(c.r_spon))
        .branch(&labels.r_o, n3, cathode, ElementKind::SignedResistor(c.r_o));
    labels
}

/// Stand-alone network fragment for the diode, using the default `laser.` prefix.
pub fn equivalent_network(c: &LaserCircuit, cathode: &str, anode: &str) -> Result<Network> {
    c.validate()?;
    let mut b = NetworkBuilder::new();
    b.node(cathode);
    b.node(anode);
    append_equivalent(&mut b, c, cathode, anode, "laser.");
    b.build()
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be positive and finite")))
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}
