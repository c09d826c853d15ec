//! Fixed-step modified nodal analysis.
//!
//! Unknowns are the non-reference node voltages followed by one current per
//! inductor, voltage source and signed resistor. Capacitors and inductors are
//! replaced by their backward-Euler or trapezoidal companion models; the
//! system matrix is constant for a fixed step and is factored once.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::element::{ElementKind, Source};
use crate::linalg::Lu;
use crate::math;
use crate::topology::{boundary, BranchId, Network, NodeId};
use crate::waveform::{Unit, Waveform};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    BackwardEuler,
    #[default]
    Trapezoidal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// KCL residual bound relative to the largest branch current of the step.
    pub solver_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { t_end: 20e-9, dt: 1e-12, method: Method::Trapezoidal, solver_tol: 1e-6 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", format!("{} must be positive", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad("t_end", format!("{} must be at least one step", self.t_end));
        }
        if !(self.solver_tol > 0.0) {
            return bad("solver_tol", format!("{} must be positive", self.solver_tol));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        math::round(self.t_end / self.dt) as usize
    }
}

/// Node voltages and branch currents on the common time grid `0, dt, ..., t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    nodes: Vec<NodeId>,
    branches: Vec<BranchId>,
    node_voltages: Vec<Waveform>,
    branch_currents: Vec<Waveform>,
    max_kcl_residual: f64,
    max_current: f64,
}

impl SimResult {
    pub fn node_voltage(&self, label: &str) -> Option<&Waveform> {
        self.nodes.iter().position(|n| n.as_str() == label).map(|i| &self.node_voltages[i])
    }

    pub fn branch_current(&self, id: &str) -> Option<&Waveform> {
        self.branches.iter().position(|b| b.as_str() == id).map(|i| &self.branch_currents[i])
    }

    pub fn node_voltages(&self) -> impl Iterator<Item = (&NodeId, &Waveform)> {
        self.nodes.iter().zip(&self.node_voltages)
    }

    pub fn branch_currents(&self) -> impl Iterator<Item = (&BranchId, &Waveform)> {
        self.branches.iter().zip(&self.branch_currents)
    }

    /// Largest per-node KCL residual over all steps, in amps.
    pub fn max_kcl_residual(&self) -> f64 {
        self.max_kcl_residual
    }

    /// Largest absolute branch current over all steps, in amps.
    pub fn max_current(&self) -> f64 {
        self.max_current
    }

    pub fn len(&self) -> usize {
        self.node_voltages.first().map_or(0, |w| w.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy)]
enum Stamp {
    /// Conductance form: resistors and capacitor companions.
    Conductance,
    /// Branch-current unknown at the given column.
    Current(usize),
    Source,
    Skip,
}

struct Assembly<'a> {
    net: &'a Network,
    /// Unknown index for each node (`None` for the reference).
    node_col: Vec<Option<usize>>,
    stamps: Vec<Stamp>,
    size: usize,
}

impl<'a> Assembly<'a> {
    fn new(net: &'a Network, reference: usize) -> Result<Self> {
        let mut node_col = vec![None; net.node_count()];
        let mut size = 0;
        for (i, col) in node_col.iter_mut().enumerate() {
            if i != reference {
                *col = Some(size);
                size += 1;
            }
        }
        let mut stamps = Vec::with_capacity(net.branch_count());
        for b in net.branches() {
            if b.is_self_loop() {
                if let ElementKind::VoltageSource(_) = b.element() {
                    return Err(Error::InvalidNetwork(format!(
                        "voltage source `{}` is a self-loop",
                        b.id()
                    )));
                }
                stamps.push(Stamp::Skip);
                continue;
            }
            let s = match b.element() {
                ElementKind::Resistor(_) | ElementKind::Capacitor(_) => Stamp::Conductance,
                ElementKind::CurrentSource(_) => Stamp::Source,
                ElementKind::Inductor(_) | ElementKind::VoltageSource(_) | ElementKind::SignedResistor(_) => {
                    size += 1;
                    Stamp::Current(size - 1)
                }
            };
            stamps.push(s);
        }
        Ok(Assembly { net, node_col, stamps, size })
    }

    fn add(&self, m: &mut [f64], row: Option<usize>, col: Option<usize>, v: f64) {
        if let (Some(r), Some(c)) = (row, col) {
            m[r * self.size + c] += v;
        }
    }

    fn add_rhs(rhs: &mut [f64], row: Option<usize>, v: f64) {
        if let Some(r) = row {
            rhs[r] += v;
        }
    }

    /// Matrix for the DC operating point (`h = None`) or for a transient step of size `h`.
    fn matrix(&self, h: Option<(f64, Method)>) -> Vec<f64> {
        let n = self.size;
        let mut m = vec![0.0; n * n];
        for (b, stamp) in self.net.branches().iter().zip(&self.stamps) {
            let (s, e) = (self.node_col[b.start()], self.node_col[b.end()]);
            match (*stamp, b.element()) {
                (Stamp::Conductance, el) => {
                    let g = match (el, h) {
                        (ElementKind::Resistor(r), _) => 1.0 / r,
                        (ElementKind::Capacitor(c), Some((h, method))) => companion_factor(method) * c / h,
                        _ => 0.0,
                    };
                    self.add(&mut m, s, s, g);
                    self.add(&mut m, s, e, -g);
                    self.add(&mut m, e, s, -g);
                    self.add(&mut m, e, e, g);
                }
                (Stamp::Current(k), el) => {
                    // KCL: the branch current leaves `start` and enters `end`.
                    self.add(&mut m, s, Some(k), 1.0);
                    self.add(&mut m, e, Some(k), -1.0);
                    match el {
                        ElementKind::VoltageSource(_) => {
                            self.add(&mut m, Some(k), s, -1.0);
                            self.add(&mut m, Some(k), e, 1.0);
                        }
                        ElementKind::SignedResistor(r) => {
                            self.add(&mut m, Some(k), s, 1.0);
                            self.add(&mut m, Some(k), e, -1.0);
                            m[k * n + k] -= r;
                        }
                        ElementKind::Inductor(l) => {
                            self.add(&mut m, Some(k), s, 1.0);
                            self.add(&mut m, Some(k), e, -1.0);
                            if let Some((h, method)) = h {
                                m[k * n + k] -= companion_factor(method) * l / h;
                            }
                        }
                        _ => unreachable!(),
                    }
                }
                (Stamp::Source, _) | (Stamp::Skip, _) => {}
            }
        }
        m
    }

    fn singular(&self) -> Error {
        // Nodes with no DC-conducting path (R, L, V, signed R) to the reference.
        let reference = self.net.reference().unwrap_or(0);
        let n = self.net.node_count();
        let mut reached = vec![false; n];
        reached[reference] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for b in self.net.branches() {
                let conducts = matches!(
                    b.element(),
                    ElementKind::Resistor(_)
                        | ElementKind::Inductor(_)
                        | ElementKind::VoltageSource(_)
                        | ElementKind::SignedResistor(_)
                );
                if conducts && reached[b.start()] != reached[b.end()] {
                    reached[b.start()] = true;
                    reached[b.end()] = true;
                    changed = true;
                }
            }
        }
        let floating = self
            .net
            .nodes()
            .iter()
            .zip(&reached)
            .filter(|(_, r)| !**r)
            .map(|(n, _)| String::from(n.as_str()))
            .collect();
        Error::SingularSystem { floating }
    }
}

fn companion_factor(method: Method) -> f64 {
    match method {
        Method::BackwardEuler => 1.0,
        Method::Trapezoidal => 2.0,
    }
}

fn source_value(el: &ElementKind, t: f64) -> f64 {
    match el {
        ElementKind::CurrentSource(s) | ElementKind::VoltageSource(s) => s.value_at(t),
        _ => 0.0,
    }
}

/// Runs a fixed-step transient from the DC operating point at `t = 0`.
pub fn transient(net: &Network, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let reference = net.reference().ok_or(Error::NoReference)?;
    if !net.branches().iter().any(|b| b.element().is_source()) {
        return Err(Error::NoSource);
    }
    for b in net.branches() {
        if let ElementKind::CurrentSource(Source::Pulse(spec)) | ElementKind::VoltageSource(Source::Pulse(spec)) =
            b.element()
        {
            spec.validate()?;
            if cfg.dt > spec.width / 20.0 {
                return Err(Error::InvalidParameter {
                    name: "dt",
                    reason: format!(
                        "{:e} s does not resolve the {:e} s pulse of `{}` (need dt <= width/20)",
                        cfg.dt,
                        spec.width,
                        b.id()
                    ),
                });
            }
        }
    }

    let asm = Assembly::new(net, reference)?;
    let size = asm.size;
    let bm = boundary(net);
    let steps = cfg.steps();
    let nb = net.branch_count();
    let h = cfg.dt;

    let mut voltages: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); net.node_count()];
    let mut currents: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); nb];
    let mut node_v = vec![0.0; net.node_count()];
    let mut branch_i = vec![0.0; nb];
    let mut rhs = vec![0.0; size];
    let mut x = Vec::with_capacity(size);
    let mut max_residual = 0.0f64;
    let mut max_current = 0.0f64;

    // Operating point: capacitors open, inductors shorted.
    let dc = Lu::factor(size, asm.matrix(None)).ok_or_else(|| asm.singular())?;
    let tran = Lu::factor(size, asm.matrix(Some((h, cfg.method)))).ok_or_else(|| asm.singular())?;

    for step in 0..=steps {
        let t = step as f64 * h;
        rhs.iter_mut().for_each(|v| *v = 0.0);
        let dc_step = step == 0;
        // History terms from the previous step, stamped alongside the sources.
        let mut cap_history = vec![0.0; nb];
        for (bi, (b, stamp)) in net.branches().iter().zip(&asm.stamps).enumerate() {
            let (s, e) = (asm.node_col[b.start()], asm.node_col[b.end()]);
            match (*stamp, b.element()) {
                (Stamp::Source, el) => {
                    let j = source_value(el, t);
                    Assembly::add_rhs(&mut rhs, s, -j);
                    Assembly::add_rhs(&mut rhs, e, j);
                }
                (Stamp::Current(k), ElementKind::VoltageSource(src)) => rhs[k] = src.value_at(t),
                (Stamp::Current(k), ElementKind::Inductor(l)) if !dc_step => {
                    let v_prev = node_v[b.start()] - node_v[b.end()];
                    rhs[k] = match cfg.method {
                        Method::BackwardEuler => -(l / h) * branch_i[bi],
                        Method::Trapezoidal => -(2.0 * l / h) * branch_i[bi] - v_prev,
                    };
                }
                (Stamp::Conductance, ElementKind::Capacitor(c)) if !dc_step => {
                    let v_prev = node_v[b.start()] - node_v[b.end()];
                    let hist = match cfg.method {
                        Method::BackwardEuler => -(c / h) * v_prev,
                        Method::Trapezoidal => -(2.0 * c / h) * v_prev - branch_i[bi],
                    };
                    cap_history[bi] = hist;
                    Assembly::add_rhs(&mut rhs, s, -hist);
                    Assembly::add_rhs(&mut rhs, e, hist);
                }
                _ => {}
            }
        }
        if dc_step {
            dc.solve(&rhs, &mut x);
        } else {
            tran.solve(&rhs, &mut x);
        }
        for (i, col) in asm.node_col.iter().enumerate() {
            node_v[i] = col.map_or(0.0, |c| x[c]);
        }
        for (bi, (b, stamp)) in net.branches().iter().zip(&asm.stamps).enumerate() {
            let v = node_v[b.start()] - node_v[b.end()];
            branch_i[bi] = match (*stamp, b.element()) {
                (Stamp::Conductance, ElementKind::Resistor(r)) => v / r,
                (Stamp::Conductance, ElementKind::Capacitor(c)) => {
                    if dc_step {
                        0.0
                    } else {
                        companion_factor(cfg.method) * c / h * v + cap_history[bi]
                    }
                }
                (Stamp::Current(k), _) => x[k],
                (Stamp::Source, el) => source_value(el, t),
                (Stamp::Skip, ElementKind::CurrentSource(src)) => src.value_at(t),
                _ => 0.0,
            };
        }
        let step_max = branch_i.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let residual = bm
            .apply(&branch_i)?
            .iter()
            .enumerate()
            .filter(|(n, _)| *n != reference)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        let bound = cfg.solver_tol * step_max;
        if residual > bound {
            return Err(Error::StepRejected { step, residual, bound });
        }
        max_residual = max_residual.max(residual);
        max_current = max_current.max(step_max);
        for (i, &v) in node_v.iter().enumerate() {
            voltages[i].push(v);
        }
        for (i, &v) in branch_i.iter().enumerate() {
            currents[i].push(v);
        }
    }

    let wave = |samples: Vec<f64>, unit| Waveform::new(0.0, h, samples, unit);
    Ok(SimResult {
        nodes: net.nodes().to_vec(),
        branches: net.branches().iter().map(|b| b.id().clone()).collect(),
        node_voltages: voltages.into_iter().map(|s| wave(s, Unit::Volt)).collect::<Result<_>>()?,
        branch_currents: currents.into_iter().map(|s| wave(s, Unit::Ampere)).collect::<Result<_>>()?,
        max_kcl_residual: max_residual,
        max_current,
    })
}
