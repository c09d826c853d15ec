use std::path::{Path, PathBuf};
use std::process::Command;

use pulsenet::core::laser::LaserCircuit;
use pulsenet::core::metrics::fwhm;
use pulsenet::core::sim::{driver_network, StimulusSpec};
use pulsenet::core::{Unit, Waveform};
use pulsenet::netlist::format_netlist;
use pulsenet::wavecsv::{format_waveform, read_waveform};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn pulsenet(args: &[&str]) -> Output {
    pulsenet_env(args, &[])
}

fn pulsenet_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pulsenet"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn value(stdout: &str, name: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(name)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no `{name}` in\n{stdout}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn gaussian_csv(dir: &Path, name: &str, amp: f64, center: f64) -> String {
    let w = Waveform::from_fn(0.0, 1e-12, 4000, Unit::Ampere, |t| {
        amp * (-0.5 * ((t - center) / 250e-12).powi(2)).exp()
    })
    .unwrap();
    write(dir, name, &format_waveform(&w))
}

#[test]
fn laser_params_forward_and_inverse() {
    let fwd = pulsenet(&["laser-params", "--config", &cfg("laser_physics.cfg")]);
    assert_eq!(fwd.code, 0, "{}", fwd.stderr);
    for (name, expected) in [("R", 2.555), ("L", 6.184e-12), ("C", 0.3557e-9), ("R_spon", 2.811e-3), ("R_o", -5.511e-3)] {
        let got = value(&fwd.stdout, name);
        assert!((got / expected - 1.0).abs() < 5e-3, "{name}: {got}");
    }
    let inv = pulsenet(&["laser-params", "--config", &cfg("laser_circuit.cfg"), "--invert"]);
    assert_eq!(inv.code, 0, "{}", inv.stderr);
    assert!((value(&inv.stdout, "n_photon") - 0.1002).abs() < 1e-4);
    assert!((value(&inv.stdout, "tau_spon") - 1.0e-9).abs() < 1e-12);
}

#[test]
fn netcheck_reports_cycle_rank() {
    let out = pulsenet(&["netcheck", &cfg("triangle.net")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(value(&out.stdout, "cycle_rank"), 1.0);
    assert!(out.stderr.is_empty());
}

#[test]
fn golden_driver_netlist() {
    let laser = LaserCircuit { r: 2.555, l: 6.184e-12, c: 0.3557e-9, r_spon: 2.811e-3, r_o: -5.511e-3 };
    let d = driver_network(&StimulusSpec::default(), &laser, None).unwrap();
    let golden = std::fs::read_to_string(configs().join("driver_default.net")).unwrap();
    let body: String = golden.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    assert_eq!(format_netlist(&d.network).unwrap(), body);

    let out = pulsenet(&["netcheck", &cfg("driver_default.net")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(value(&out.stdout, "nodes"), 8.0);
    assert_eq!(value(&out.stdout, "branches"), 11.0);
    assert_eq!(value(&out.stdout, "cycle_rank"), 4.0);
}

#[test]
fn simulate_writes_deterministic_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let r = pulsenet(&["simulate", "--config", &cfg("driver_pulse.cfg"), "-o", out.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!((value(&r.stdout, "fwhm") / 600e-12 - 1.0).abs() < 0.1);
    }
    for f in ["laser_current.csv", "optical_current.csv", "output_current.csv", "laser_current.svg", "network.net"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert!(!x.is_empty(), "{f}");
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let w = read_waveform(&a.join("laser_current.csv")).unwrap();
    assert_eq!(w.unit(), Unit::Ampere);
    let m = fwhm(&w.map(|x| x - 31e-3).unwrap()).unwrap();
    assert!((m.fwhm / 600e-12 - 1.0).abs() < 0.1, "{}", m.fwhm);
    assert!((m.peak / 10.5e-3 - 1.0).abs() < 0.02, "{}", m.peak);
}

#[test]
fn netlist_mode_writes_probes() {
    let dir = tempfile::tempdir().unwrap();
    let r = pulsenet(&["simulate", "--config", &cfg("rc_step.cfg"), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = read_waveform(&dir.path().join("C1.csv")).unwrap();
    // Capacitor current of the RC step decays from V/R.
    assert!((c.max().1 - 1e-3).abs() < 1e-5, "{}", c.max().1);
    assert!(dir.path().join("probes.svg").exists());
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for threads in ["1", "4"] {
        let csv = dir.path().join(format!("sweep{threads}.csv"));
        let r = pulsenet_env(
            &[
                "sweep",
                "--config",
                &cfg("driver_pulse.cfg"),
                "--vary",
                "amplitude",
                "--values",
                "10.5mA,8.2mA",
                "--out",
                csv.to_str().unwrap(),
            ],
            &[("PULSENET_THREADS", threads)],
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
        tables.push(std::fs::read_to_string(csv).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[0].lines().count(), 3);

    let bad = pulsenet_env(
        &["sweep", "--config", &cfg("driver_pulse.cfg"), "--vary", "delay", "--values", "1ns"],
        &[("PULSENET_THREADS", "0")],
    );
    assert_eq!(bad.code, 2);
}

#[test]
fn metrics_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_csv(dir.path(), "a.csv", 1e-3, 2e-9);
    let b = gaussian_csv(dir.path(), "b.csv", 1e-3, 2.06e-9);
    let m = pulsenet(&["metrics", &a]);
    assert_eq!(m.code, 0, "{}", m.stderr);
    let expected = 2.0 * (2.0 * 2f64.ln()).sqrt() * 250e-12;
    assert!((value(&m.stdout, "fwhm") - expected).abs() < 1e-12);
    let c = pulsenet(&["compare", &a, &b, "--level", "0.5mA"]);
    assert_eq!(c.code, 0, "{}", c.stderr);
    assert!((value(&c.stdout, "delay") - 60e-12).abs() < 1e-13);
}

#[test]
fn kstest_self_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_csv(dir.path(), "a.csv", 1e-3, 2e-9);
    let r = pulsenet(&["kstest", &a, &a]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(value(&r.stdout, "D"), 0.0);
    assert_eq!(value(&r.stdout, "p_value"), 1.0);
    assert!(r.stdout.contains("same distribution"), "{}", r.stdout);
}

#[test]
fn kstest_emits_cdfs() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian_csv(dir.path(), "a.csv", 1e-3, 2e-9);
    let b = gaussian_csv(dir.path(), "b.csv", 2e-3, 3e-9);
    let cdf = dir.path().join("cdf.csv");
    let r = pulsenet(&["kstest", &a, &b, "--emit-cdf", cdf.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(cdf).unwrap();
    assert!(text.starts_with("x,F_a,F_b"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&last[1..], &[1.0, 1.0]);
}

#[test]
fn unknown_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = std::fs::read_to_string(configs().join("driver_pulse.cfg")).unwrap();
    text.push_str("amplitdue = 3mA\n");
    let p = write(dir.path(), "typo.cfg", &text);
    let r = pulsenet(&["simulate", "--config", &p, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("amplitdue"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn unit_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.cfg", "T = 300.1K\nI_d = 18.4mV\n");
    let r = pulsenet(&["laser-params", "--config", &p]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2") && r.stderr.contains("I_d"), "{}", r.stderr);
}

#[test]
fn missing_key_and_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "short.cfg", "T = 300.1K\n");
    let r = pulsenet(&["laser-params", "--config", &p]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("I_d"), "{}", r.stderr);

    assert_eq!(pulsenet(&["frobnicate"]).code, 2);
    assert_eq!(pulsenet(&["kstest", "only-one.csv"]).code, 2);
    assert_eq!(pulsenet(&["--help"]).code, 0);
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // Circuit resistance above the differential resistance has no physical inversion.
    let p = write(
        dir.path(),
        "nonphys.cfg",
        "T = 300.1K\nI_d = 18.4mA\nn_e = 1\nn_sat = 5\nR = 3ohm\nL = 6.184pH\nC = 0.3557nF\nR_spon = 2.811mohm\nR_o = -5.511mohm\n",
    );
    let r = pulsenet(&["laser-params", "--config", &p, "--invert"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stderr.starts_with("error:"));

    let missing = pulsenet(&["metrics", dir.path().join("absent.csv").to_str().unwrap()]);
    assert_eq!(missing.code, 1);
}

#[test]
fn jittered_csv_reports_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "jitter.csv", "# t0 = 0\ntime_s,value\n0,0\n1e-12,1\n2.1e-12,0\n");
    let r = pulsenet(&["metrics", &p]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 5"), "{}", r.stderr);

    let p = write(dir.path(), "ragged.csv", "time_s,value\n0,0\n1e-12,1,2\n");
    let r = pulsenet(&["metrics", &p]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn malformed_netlist_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.net", "# two branches\nR1 0 a R 1kohm\nC1 a 0 C 1nH\n");
    let r = pulsenet(&["netcheck", &p]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}
