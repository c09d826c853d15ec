//! Waveform CSV files: optional `#` header lines, an optional `time_s,value`
//! column header, then `time,value` rows on a uniform grid.
//!
//! The writer records `t0`, `dt` and the unit in `#` headers and prints every
//! number with 17 significant digits, so reading back is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use pulsenet_core::stats::EmpiricalCdf;
use pulsenet_core::{Unit, Waveform};

use crate::CliError;

/// Relative tolerance on the spacing of consecutive time stamps.
pub const DT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

fn unit_symbol(u: Unit) -> &'static str {
    match u {
        Unit::Ampere => "A",
        Unit::Volt => "V",
        Unit::Dimensionless => "1",
    }
}

pub fn format_waveform(w: &Waveform) -> String {
    let mut out = String::with_capacity(48 * w.len() + 80);
    let _ = writeln!(out, "# unit = {}", unit_symbol(w.unit()));
    let _ = writeln!(out, "# t0 = {:.16e}", w.t0());
    let _ = writeln!(out, "# dt = {:.16e}", w.dt());
    out.push_str("time_s,value\n");
    for (i, v) in w.samples().iter().enumerate() {
        let _ = writeln!(out, "{:.16e},{:.16e}", w.time(i), v);
    }
    out
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.trim_start_matches('#').trim();
    let (k, v) = rest.split_once('=')?;
    (k.trim() == key).then(|| v.trim())
}

pub fn parse_waveform(text: &str) -> Result<Waveform, CsvError> {
    let mut t0_hdr = None;
    let mut dt_hdr = None;
    let mut unit = Unit::Dimensionless;
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    let number = |s: &str, line: usize, what: &str| -> Result<f64, CsvError> {
        let v: f64 = s.trim().parse().map_err(|_| CsvError { line, message: format!("malformed {what} `{}`", s.trim()) })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CsvError { line, message: format!("non-finite {what}") })
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if l.starts_with('#') {
            if let Some(v) = header_value(l, "t0") {
                t0_hdr = Some(number(v, line, "t0")?);
            } else if let Some(v) = header_value(l, "dt") {
                dt_hdr = Some(number(v, line, "dt")?);
            } else if let Some(v) = header_value(l, "unit") {
                unit = match v {
                    "A" => Unit::Ampere,
                    "V" => Unit::Volt,
                    _ => Unit::Dimensionless,
                };
            }
            continue;
        }
        let fields: Vec<&str> = l.split(',').collect();
        if rows.is_empty() && fields.first().is_some_and(|f| f.trim().starts_with("time")) {
            continue;
        }
        if fields.len() != 2 {
            return Err(CsvError { line, message: format!("expected 2 columns, found {}", fields.len()) });
        }
        rows.push((line, number(fields[0], line, "time")?, number(fields[1], line, "value")?));
    }
    if rows.len() < 2 {
        return Err(CsvError { line: text.lines().count().max(1), message: "need at least two samples".into() });
    }
    let t0 = t0_hdr.unwrap_or(rows[0].1);
    // Without a header the first step is the reference, so the first row that departs from it is reported.
    let dt = dt_hdr.unwrap_or(rows[1].1 - rows[0].1);
    if !(dt > 0.0) {
        return Err(CsvError { line: rows[1].0, message: "time column is not increasing".into() });
    }
    if (rows[0].1 - t0).abs() > DT_TOLERANCE * dt {
        return Err(CsvError { line: rows[0].0, message: format!("first time {} disagrees with t0 = {t0}", rows[0].1) });
    }
    for pair in rows.windows(2) {
        let step = pair[1].1 - pair[0].1;
        if (step - dt).abs() > DT_TOLERANCE * dt {
            return Err(CsvError {
                line: pair[1].0,
                message: format!("non-uniform time grid: step {step:e} s vs dt {dt:e} s"),
            });
        }
    }
    let samples = rows.into_iter().map(|(_, _, v)| v).collect();
    Waveform::new(t0, dt, samples, unit).map_err(|e| CsvError { line: 1, message: e.to_string() })
}

pub fn read_waveform(path: &Path) -> Result<Waveform, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_waveform(&text).map_err(|e| CliError::Csv { path: path.to_path_buf(), source: e })
}

pub fn write_waveform(path: &Path, w: &Waveform) -> Result<(), CliError> {
    crate::write_file(path, &format_waveform(w))
}

/// Both empirical CDFs evaluated at every distinct pooled sample value.
pub fn format_cdfs(a: &EmpiricalCdf, b: &EmpiricalCdf) -> String {
    let mut xs: Vec<f64> = a.sorted().iter().chain(b.sorted()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut out = String::from("x,F_a,F_b\n");
    for x in xs {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", x, a.eval(x), b.eval(x));
    }
    out
}
