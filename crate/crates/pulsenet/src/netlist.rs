//! Netlist text format, one branch per line:
//!
//! ```text
//! # comment
//! .ground gnd
//! R1   a    b    R 1kohm
//! C1   b    gnd  C 1nF
//! Ib   gnd  a    I pulse amplitude=10.5mA width=600ps delay=2ns edge=100ps rate=100kHz shape=trapezoid
//! Vin  gnd  in   V file:step.csv
//! ```
//!
//! Element kinds: `R`, `RS` (signed resistance), `L`, `C`, `I`, `V`. Values may
//! carry a unit suffix or be bare SI numbers. A branch whose two nodes coincide
//! is a self-loop. Without `.ground`, a node named `0` or `gnd` is the reference.

use std::fmt::Write as _;
use std::path::Path;

use pulsenet_core::sim::{PulseShape, StimulusSpec};
use pulsenet_core::topology::{Network, NetworkBuilder};
use pulsenet_core::{ElementKind, Source};

use crate::quantity::{parse_as, Dimension};
use crate::{wavecsv, CliError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct NetlistError {
    pub line: usize,
    pub message: String,
}

fn value(text: &str, dim: Dimension, line: usize) -> Result<f64, NetlistError> {
    parse_as(text, dim, true).map_err(|e| NetlistError { line, message: format!("`{text}`: {e}") })
}

pub fn parse_shape(word: &str) -> Option<PulseShape> {
    match word {
        "trapezoid" => Some(PulseShape::Trapezoid),
        "gaussian" => Some(PulseShape::Gaussian),
        "raised-cosine" | "raised_cosine" => Some(PulseShape::RaisedCosine),
        _ => None,
    }
}

pub fn shape_name(shape: PulseShape) -> &'static str {
    match shape {
        PulseShape::Trapezoid => "trapezoid",
        PulseShape::Gaussian => "gaussian",
        PulseShape::RaisedCosine => "raised-cosine",
    }
}

fn pulse(args: &[&str], dim: Dimension, line: usize) -> Result<StimulusSpec, NetlistError> {
    let mut spec = StimulusSpec { pre_bias: 0.0, ..StimulusSpec::default() };
    for arg in args {
        let (k, v) = arg
            .split_once('=')
            .ok_or_else(|| NetlistError { line, message: format!("expected key=value, found `{arg}`") })?;
        match k {
            "amplitude" => spec.amplitude = value(v, dim, line)?,
            "width" => spec.width = value(v, Dimension::Second, line)?,
            "delay" => spec.delay = value(v, Dimension::Second, line)?,
            "edge" => spec.edge_time = value(v, Dimension::Second, line)?,
            "rate" => spec.repetition_rate = value(v, Dimension::Hertz, line)?,
            "shape" => {
                spec.shape = parse_shape(v).ok_or_else(|| NetlistError { line, message: format!("unknown shape `{v}`") })?
            }
            _ => return Err(NetlistError { line, message: format!("unknown pulse parameter `{k}`") }),
        }
    }
    spec.validate().map_err(|e| NetlistError { line, message: e.to_string() })?;
    Ok(spec)
}

fn source(args: &[&str], dim: Dimension, line: usize, base: &Path) -> Result<Source, NetlistError> {
    match args {
        [one] if one.starts_with("file:") => {
            let path = base.join(&one[5..]);
            let w = wavecsv::read_waveform(&path).map_err(|e| NetlistError { line, message: e.to_string() })?;
            Ok(Source::Sampled(w))
        }
        ["pulse", rest @ ..] => Ok(Source::Pulse(pulse(rest, dim, line)?)),
        [one] => Ok(Source::Constant(value(one, dim, line)?)),
        _ => Err(NetlistError { line, message: "expected a value, `file:<csv>` or `pulse ...`".into() }),
    }
}

/// Parses netlist text; `file:` references resolve against `base`.
pub fn parse_netlist(text: &str, base: &Path) -> Result<Network, NetlistError> {
    let mut b = NetworkBuilder::new();
    let mut ground: Option<String> = None;
    let mut seen: Vec<String> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens[0].starts_with('.') {
            match tokens.as_slice() {
                [".ground", node] => ground = Some(node.to_string()),
                _ => return Err(NetlistError { line, message: format!("unknown directive `{}`", tokens[0]) }),
            }
            continue;
        }
        let [id, start, end, kind, args @ ..] = tokens.as_slice() else {
            return Err(NetlistError { line, message: "expected `id start end element value`".into() });
        };
        if seen.iter().any(|s| s == id) {
            return Err(NetlistError { line, message: format!("duplicate branch id `{id}`") });
        }
        seen.push(id.to_string());
        let single = |dim| match args {
            [v] => value(v, dim, line),
            _ => Err(NetlistError { line, message: format!("`{kind}` takes exactly one value") }),
        };
        let element = match *kind {
            "R" => ElementKind::Resistor(single(Dimension::Ohm)?),
            "RS" => ElementKind::SignedResistor(single(Dimension::Ohm)?),
            "L" => ElementKind::Inductor(single(Dimension::Henry)?),
            "C" => ElementKind::Capacitor(single(Dimension::Farad)?),
            "I" => ElementKind::CurrentSource(source(args, Dimension::Ampere, line, base)?),
            "V" => ElementKind::VoltageSource(source(args, Dimension::Volt, line, base)?),
            other => return Err(NetlistError { line, message: format!("unknown element `{other}`") }),
        };
        if start == end {
            b.self_loop(id, start, element);
        } else {
            b.branch(id, start, end, element);
        }
    }
    let mut net = b.build().map_err(|e| NetlistError { line: last_line.max(1), message: e.to_string() })?;
    let reference = ground.or_else(|| ["0", "gnd"].into_iter().find(|g| net.node_index(g).is_some()).map(String::from));
    if let Some(g) = reference {
        net = net.with_reference(&g).map_err(|e| NetlistError { line: last_line.max(1), message: e.to_string() })?;
    }
    Ok(net)
}

pub fn read_netlist(path: &Path) -> Result<Network, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_netlist(&text, base).map_err(|e| CliError::Netlist { path: path.to_path_buf(), source: e })
}

fn q(v: f64, dim: Dimension) -> String {
    format!("{v:e}{}", dim.symbol())
}

/// Emits `net` in netlist form. Sampled sources cannot be inlined and are an error.
pub fn format_netlist(net: &Network) -> Result<String, CliError> {
    let mut out = String::new();
    if let Some(r) = net.reference() {
        let _ = writeln!(out, ".ground {}", net.nodes()[r]);
    }
    for br in net.branches() {
        let spec = match br.element() {
            ElementKind::Resistor(v) => format!("R {}", q(*v, Dimension::Ohm)),
            ElementKind::SignedResistor(v) => format!("RS {}", q(*v, Dimension::Ohm)),
            ElementKind::Inductor(v) => format!("L {}", q(*v, Dimension::Henry)),
            ElementKind::Capacitor(v) => format!("C {}", q(*v, Dimension::Farad)),
            ElementKind::CurrentSource(s) => format!("I {}", source_text(s, Dimension::Ampere, br.id().as_str())?),
            ElementKind::VoltageSource(s) => format!("V {}", source_text(s, Dimension::Volt, br.id().as_str())?),
        };
        let nodes = net.nodes();
        let _ = writeln!(out, "{} {} {} {}", br.id(), nodes[br.start()], nodes[br.end()], spec);
    }
    Ok(out)
}

fn source_text(s: &Source, dim: Dimension, id: &str) -> Result<String, CliError> {
    match s {
        Source::Constant(v) => Ok(q(*v, dim)),
        Source::Pulse(p) => Ok(format!(
            "pulse amplitude={} width={} delay={} edge={} rate={} shape={}",
            q(p.amplitude, dim),
            q(p.width, Dimension::Second),
            q(p.delay, Dimension::Second),
            q(p.edge_time, Dimension::Second),
            q(p.repetition_rate, Dimension::Hertz),
            shape_name(p.shape)
        )),
        Source::Sampled(_) => Err(CliError::Usage(format!("branch `{id}`: sampled sources cannot be written inline"))),
    }
}
