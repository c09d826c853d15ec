use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use pulsenet_core::laser::{circuit_from_physics, physics_from_circuit, LaserCircuit, LaserPhysics};
use pulsenet_core::metrics::{baseline_subtract, delay_at_level, fwhm, measure, normalize_align, PulseMetrics};
use pulsenet_core::sim::{
    detector_filter, driver_network_with, quiet_window, sweep_point, transient, SweepParameter, SweepRow,
};
use pulsenet_core::stats::{ks_two_sample, waveform_samples_for_cdf, CdfWindow, EmpiricalCdf};
use pulsenet_core::topology::{boundary, cycle_space};
use pulsenet_core::Waveform;

use crate::config::Config;
use crate::netlist::{format_netlist, read_netlist};
use crate::plot::{render_svg, Series};
use crate::quantity::{parse_as, parse_quantity, Dimension};
use crate::{schema, wavecsv, write_file, CliError};

#[derive(Debug, Parser)]
#[command(name = "pulsenet", version, about = "Pre-biased laser pulse driver modelling and pulse comparison")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert rate-equation parameters to equivalent-circuit values (or back with --invert).
    LaserParams {
        /// `key = value` file with the laser parameters.
        #[arg(long)]
        config: PathBuf,
        /// Read R, L, C, R_spon, R_o and print the rate-equation parameters.
        #[arg(long)]
        invert: bool,
    },
    /// Report node/branch counts, rank and a cycle basis of a netlist.
    Netcheck {
        netlist: PathBuf,
        /// Also print the boundary (incidence) matrix.
        #[arg(long)]
        matrix: bool,
    },
    /// Run a transient simulation of the driver or of a netlist.
    Simulate {
        /// Driver or netlist simulation config.
        #[arg(long)]
        config: PathBuf,
        /// Directory for the CSV, SVG and netlist artifacts.
        #[arg(long, short = 'o', default_value = "pulsenet-out")]
        out_dir: PathBuf,
    },
    /// Simulate the driver once per parameter value and tabulate the laser pulse.
    Sweep {
        /// Driver simulation config; the swept key overrides its value.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        vary: Vary,
        /// Comma-separated quantities, e.g. `0ns,8ns`.
        #[arg(long)]
        values: String,
        /// Also write the table to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Plot the peak value against the swept parameter.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Pulse metrics of a waveform CSV.
    Metrics {
        file: PathBuf,
        /// Baseline window `start:end`, e.g. `0ns:1ns`.
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Delay at a level and normalized shape difference of two waveform CSVs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Crossing level in raw units (default: half of the smaller peak).
        #[arg(long)]
        level: Option<String>,
        /// Baseline window `start:end` subtracted from both traces.
        #[arg(long)]
        baseline: Option<String>,
        /// Plot both normalized, aligned pulses.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Two-sample Kolmogorov-Smirnov test on two pulse shapes.
    Kstest {
        a: PathBuf,
        b: PathBuf,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Half-width of the sampled window around the pulse center, in FWHMs.
        #[arg(long, default_value_t = 3.0)]
        window_mult: f64,
        /// Amplitude rounding step of the normalized samples (0 disables).
        #[arg(long, default_value_t = 1e-6)]
        quantum: f64,
        /// Baseline window `start:end` subtracted from both traces.
        #[arg(long)]
        baseline: Option<String>,
        /// Write both empirical CDFs as `x,F_a,F_b` rows.
        #[arg(long)]
        emit_cdf: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    Delay,
    Amplitude,
    Width,
}

impl Vary {
    fn parameter(self) -> SweepParameter {
        match self {
            Vary::Delay => SweepParameter::Delay,
            Vary::Amplitude => SweepParameter::Amplitude,
            Vary::Width => SweepParameter::Width,
        }
    }

    fn dimension(self) -> Dimension {
        match self {
            Vary::Amplitude => Dimension::Ampere,
            Vary::Delay | Vary::Width => Dimension::Second,
        }
    }
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::io(Path::new("<stdout>"), e)
}

fn row(out: &mut dyn Write, name: &str, value: f64, unit: &str) -> Result<(), CliError> {
    let line = format!("{name:<14}{value:>24.15e} {unit}");
    writeln!(out, "{}", line.trim_end()).map_err(out_err)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::LaserParams { config, invert } => laser_params(&config, invert, out),
        Command::Netcheck { netlist, matrix } => netcheck(&netlist, matrix, out),
        Command::Simulate { config, out_dir } => simulate(&config, &out_dir, out),
        Command::Sweep { config, vary, values, out: file, svg } => sweep(&config, vary, &values, file, svg, out),
        Command::Metrics { file, baseline } => metrics(&file, baseline.as_deref(), out),
        Command::Compare { a, b, level, baseline, svg } => compare(&a, &b, level.as_deref(), baseline.as_deref(), svg, out),
        Command::Kstest { a, b, alpha, window_mult, quantum, baseline, emit_cdf } => {
            kstest(&a, &b, alpha, CdfWindow { window_mult, quantum }, baseline.as_deref(), emit_cdf, out)
        }
    }
}

fn config_err(path: &Path) -> impl Fn(crate::config::ConfigError) -> CliError + '_ {
    move |source| CliError::Config { path: path.to_path_buf(), source }
}

fn print_circuit(c: &LaserCircuit, out: &mut dyn Write) -> Result<(), CliError> {
    row(out, "R", c.r, "ohm")?;
    row(out, "L", c.l, "H")?;
    row(out, "C", c.c, "F")?;
    row(out, "R_spon", c.r_spon, "ohm")?;
    row(out, "R_o", c.r_o, "ohm")
}

fn print_physics(p: &LaserPhysics, out: &mut dyn Write) -> Result<(), CliError> {
    row(out, "R_d", p.differential_resistance()?, "ohm")?;
    row(out, "n_photon", p.n_photon, "")?;
    row(out, "tau_photon", p.tau_photon, "s")?;
    row(out, "tau_spon", p.tau_spon, "s")?;
    row(out, "beta", p.beta, "")?;
    row(out, "n_e", p.n_e, "")?;
    row(out, "n_sat", p.n_sat, "")?;
    row(out, "delta", p.delta, "")
}

fn laser_params(path: &Path, invert: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if invert {
        let cfg = Config::load(path, schema::LASER_CIRCUIT)?;
        let (c, t, i, assumed) = schema::laser_circuit_inversion(&cfg).map_err(config_err(path))?;
        print_physics(&physics_from_circuit(&c, t, i, assumed)?, out)
    } else {
        let cfg = Config::load(path, schema::LASER_PHYSICS)?;
        let p = schema::laser_physics(&cfg).map_err(config_err(path))?;
        let c = circuit_from_physics(&p)?;
        row(out, "R_d", p.differential_resistance()?, "ohm")?;
        print_circuit(&c, out)
    }
}

fn netcheck(path: &Path, matrix: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let net = read_netlist(path)?;
    let d = boundary(&net);
    let z = cycle_space(&net);
    let w = |out: &mut dyn Write, k: &str, v: usize| writeln!(out, "{k:<12}{v}").map_err(out_err);
    w(out, "nodes", net.node_count())?;
    w(out, "branches", net.branch_count())?;
    w(out, "components", net.components())?;
    w(out, "rank", d.rank())?;
    w(out, "cycle_rank", z.dimension())?;
    if let Some(r) = net.reference() {
        writeln!(out, "{:<12}{}", "reference", net.nodes()[r]).map_err(out_err)?;
    }
    for (k, v) in z.vectors.iter().enumerate() {
        let terms: Vec<String> = v
            .iter()
            .zip(net.branches())
            .filter(|(c, _)| **c != 0)
            .map(|(c, b)| format!("{}:{:+}", b.id(), c))
            .collect();
        writeln!(out, "cycle {}: {}", k + 1, terms.join(" ")).map_err(out_err)?;
    }
    if matrix {
        let ids: Vec<String> = net.branches().iter().map(|b| b.id().to_string()).collect();
        writeln!(out, "boundary node,{}", ids.join(",")).map_err(out_err)?;
        for (i, n) in net.nodes().iter().enumerate() {
            let cells: Vec<String> = (0..net.branch_count()).map(|j| d.get(i, j).to_string()).collect();
            writeln!(out, "{n},{}", cells.join(",")).map_err(out_err)?;
        }
    }
    Ok(())
}

fn print_metrics(m: &PulseMetrics, unit: &str, out: &mut dyn Write) -> Result<(), CliError> {
    row(out, "baseline", m.baseline, unit)?;
    row(out, "peak", m.peak, unit)?;
    row(out, "amplitude", m.amplitude, unit)?;
    row(out, "t_peak", m.t_peak, "s")?;
    row(out, "fwhm", m.fwhm, "s")?;
    row(out, "t_rise_half", m.half_crossings.0, "s")?;
    row(out, "t_fall_half", m.half_crossings.1, "s")?;
    if m.tied_peak {
        eprintln!("warning: several samples share the peak value; the earliest was used");
    }
    Ok(())
}

fn trace(w: &Waveform, label: &str) -> Series {
    Series::new(label, (0..w.len()).map(|i| (w.time(i), w.samples()[i])).collect())
}

fn simulate(path: &Path, out_dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load(path, schema::SIMULATION)?;
    let sim = schema::sim_config(&cfg).map_err(config_err(path))?;
    if let Some(netlist) = cfg.path("netlist") {
        return simulate_netlist(&cfg, netlist, &sim, out_dir, out);
    }
    let spec = schema::stimulus(&cfg).map_err(config_err(path))?;
    let laser = schema::laser_circuit(&cfg).map_err(config_err(path))?;
    let opts = schema::driver_options(&cfg).map_err(config_err(path))?;
    let drv = driver_network_with(&spec, &laser, &opts)?;
    write_file(&out_dir.join("network.net"), &format_netlist(&drv.network)?)?;
    let result = transient(&drv.network, &sim)?;
    let current = drv.laser_current(&result)?;
    let optical = drv.optical_current(&result)?;
    wavecsv::write_waveform(&out_dir.join("laser_current.csv"), &current)?;
    wavecsv::write_waveform(&out_dir.join("optical_current.csv"), &optical)?;
    wavecsv::write_waveform(&out_dir.join("output_current.csv"), &drv.output_current(&result)?)?;
    let mut series = vec![trace(&current, "laser current")];
    if let Some(rise) = cfg.number("detector_rise") {
        let seen = detector_filter(&optical, rise)?;
        wavecsv::write_waveform(&out_dir.join("detected.csv"), &seen)?;
        series.push(trace(&seen, "detected (optical)"));
    }
    write_file(&out_dir.join("laser_current.svg"), &render_svg("Laser current", "time (s)", "current (A)", &series))?;
    let window = quiet_window(&spec, current.t_end(), sim.dt).ok_or_else(|| {
        CliError::Usage("t_end leaves no pulse-free interval for the baseline".into())
    })?;
    let m = measure(&current, window)?;
    print_metrics(&m, "A", out)?;
    row(out, "kcl_residual", result.max_kcl_residual(), "A")
}

fn simulate_netlist(
    cfg: &Config,
    netlist: &Path,
    sim: &pulsenet_core::sim::SimConfig,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let net = read_netlist(netlist)?;
    let result = transient(&net, sim)?;
    let probes: Vec<String> = match cfg.word("probes") {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => net.branches().iter().map(|b| b.id().to_string()).collect(),
    };
    let mut series = Vec::new();
    for p in &probes {
        let w = result
            .branch_current(p)
            .ok_or_else(|| CliError::Usage(format!("probe `{p}` is not a branch of {}", netlist.display())))?;
        wavecsv::write_waveform(&out_dir.join(format!("{p}.csv")), w)?;
        let (i, v) = w.max();
        writeln!(out, "{p:<14}peak {v:>24.15e} A at {:.15e} s", w.time(i)).map_err(out_err)?;
        series.push(trace(w, p));
    }
    write_file(&out_dir.join("probes.svg"), &render_svg("Branch currents", "time (s)", "current (A)", &series))?;
    row(out, "kcl_residual", result.max_kcl_residual(), "A")
}

fn thread_limit() -> Result<Option<usize>, CliError> {
    match std::env::var("PULSENET_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("PULSENET_THREADS must be a positive integer, found `{v}`"))),
        },
    }
}

fn sweep(
    path: &Path,
    vary: Vary,
    values: &str,
    file: Option<PathBuf>,
    svg: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = Config::load(path, schema::SIMULATION)?;
    if cfg.contains("netlist") {
        return Err(CliError::Usage("sweep runs the driver network; remove `netlist` from the config".into()));
    }
    let sim = schema::sim_config(&cfg).map_err(config_err(path))?;
    let spec = schema::stimulus(&cfg).map_err(config_err(path))?;
    let laser = schema::laser_circuit(&cfg).map_err(config_err(path))?;
    let opts = schema::driver_options(&cfg).map_err(config_err(path))?;
    let points = values
        .split(',')
        .map(|v| parse_as(v.trim(), vary.dimension(), false))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| CliError::Usage(format!("--values: {e}")))?;
    if points.is_empty() {
        return Err(CliError::Usage("--values is empty".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_limit()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|&v| sweep_point(&spec, &laser, &opts, &sim, vary.parameter(), v))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut table = String::from("value,peak_A,fwhm_s,t_peak_s\n");
    for r in &rows {
        table.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", r.value, r.peak, r.fwhm, r.t_peak));
    }
    out.write_all(table.as_bytes()).map_err(out_err)?;
    if let Some(f) = file {
        write_file(&f, &table)?;
    }
    if let Some(f) = svg {
        let s = Series::new("peak", rows.iter().map(|r| (r.value, r.peak)).collect());
        let x = format!("{:?} ({})", vary, vary.dimension().symbol()).to_lowercase();
        write_file(&f, &render_svg("Sweep", &x, "peak current (A)", &[s]))?;
    }
    Ok(())
}

fn window_arg(text: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = text.split_once(':').ok_or_else(|| CliError::Usage(format!("window `{text}` is not `start:end`")))?;
    let parse = |s: &str| parse_as(s.trim(), Dimension::Second, false).map_err(|e| CliError::Usage(format!("window `{text}`: {e}")));
    Ok((parse(a)?, parse(b)?))
}

fn load_corrected(path: &Path, baseline: Option<&str>) -> Result<Waveform, CliError> {
    let w = wavecsv::read_waveform(path)?;
    match baseline {
        None => Ok(w),
        Some(text) => {
            let c = baseline_subtract(&w, window_arg(text)?)?;
            if c.suspicious_window {
                eprintln!("warning: {}: baseline window variance is high; it may overlap the pulse", path.display());
            }
            Ok(c.waveform)
        }
    }
}

fn metrics(path: &Path, baseline: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let w = wavecsv::read_waveform(path)?;
    let m = match baseline {
        Some(text) => {
            let window = window_arg(text)?;
            if baseline_subtract(&w, window)?.suspicious_window {
                eprintln!("warning: baseline window variance is high; it may overlap the pulse");
            }
            measure(&w, window)?
        }
        None => fwhm(&w)?,
    };
    print_metrics(&m, w.unit().symbol(), out)
}

fn compare(
    a: &Path,
    b: &Path,
    level: Option<&str>,
    baseline: Option<&str>,
    svg: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let w1 = load_corrected(a, baseline)?;
    let w2 = load_corrected(b, baseline)?;
    let level = match level {
        Some(text) => parse_quantity(text).map_err(|e| CliError::Usage(format!("--level: {e}")))?.value,
        None => 0.5 * w1.max().1.min(w2.max().1),
    };
    row(out, "level", level, w1.unit().symbol())?;
    row(out, "delay", delay_at_level(&w1, &w2, level)?, "s")?;
    let (m1, m2) = (fwhm(&w1)?, fwhm(&w2)?);
    row(out, "fwhm_a", m1.fwhm, "s")?;
    row(out, "fwhm_b", m2.fwhm, "s")?;
    row(out, "center_shift", m2.center() - m1.center(), "s")?;
    let (n1, n2) = normalize_align(&w1, &w2)?;
    let worst = n1.samples().iter().zip(n2.samples()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    row(out, "max_shape_diff", worst, "")?;
    if let Some(f) = svg {
        let s = [trace(&n1, "a (normalized)"), trace(&n2, "b (normalized, aligned)")];
        write_file(&f, &render_svg("Normalized pulses", "time (s)", "normalized amplitude", &s))?;
    }
    Ok(())
}

fn kstest(
    a: &Path,
    b: &Path,
    alpha: f64,
    window: CdfWindow,
    baseline: Option<&str>,
    emit_cdf: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha {alpha} must lie in (0, 1)")));
    }
    let w1 = load_corrected(a, baseline)?;
    let w2 = load_corrected(b, baseline)?;
    let (sa, sb) = waveform_samples_for_cdf(&w1, &w2, window)?;
    let r = ks_two_sample(&sa, &sb, alpha)?;
    row(out, "D", r.d_stat, "")?;
    row(out, "lambda", r.lambda, "")?;
    row(out, "p_value", r.p_value, "")?;
    row(out, "alpha", r.alpha, "")?;
    row(out, "effective_n", r.effective_n, "")?;
    let decision = if r.same_distribution { "same distribution" } else { "different distributions" };
    writeln!(out, "{:<14}{decision}", "decision").map_err(out_err)?;
    if let Some(f) = emit_cdf {
        write_file(&f, &wavecsv::format_cdfs(&EmpiricalCdf::new(&sa)?, &EmpiricalCdf::new(&sb)?))?;
    }
    Ok(())
}
