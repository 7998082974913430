use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use lambda_holonomy::dynamics::REFERENCE_RABI_CAP;
use lambda_holonomy::gate::{minimize_area, MinimizeOptions};
use lambda_holonomy::io::read_waveform_file;

const HALF_PI: &str = "1.5707963267948966";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lambda-holo"));
    cmd.env_remove("LAMBDA_HOLO_WORKERS");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn compile_auto_matches_library_minimizer() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["compile", "--theta", HALF_PI, "--phi", HALF_PI, "--A", "auto", "--rabi-cap", "0.12566"]);
    let summary = json(dir.path().join("waveform.json"));
    let m = minimize_area(FRAC_PI_2, 1.0, (0.0, 1.5), MinimizeOptions::default()).unwrap();
    assert_eq!(summary["amplitude"].as_f64().unwrap(), m.amplitude);
    assert_eq!(summary["amplitude_mode"], "auto");
    assert!(summary["gate_infidelity"].as_f64().unwrap() < 1e-6);
    assert!((summary["peak_coupling"].as_f64().unwrap() - 0.12566).abs() < 1e-12);
    let w = read_waveform_file(&dir.path().join("waveform.txt")).unwrap();
    assert!((w.schedule.peak_coupling() - 0.12566).abs() < 1e-12);
}

#[test]
fn compile_auto_reports_reference_amplitude() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["compile", "--theta", "1.570796", "--phi", "1.570796", "--A", "auto", "--rabi-cap", "0.12566"]);
    let a = json(dir.path().join("waveform.json"))["amplitude"].as_f64().unwrap();
    assert!((a - 0.46).abs() <= 0.02, "auto amplitude {a}");
}

#[test]
fn zero_rotation_leaves_channel_one_dark() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["compile", "--theta", "0", "--phi", "0", "--A", "0.3", "--T", "30", "--out", "zero.txt"]);
    let w = read_waveform_file(&dir.path().join("zero.txt")).unwrap();
    assert!(w.schedule.omega1().iter().all(|o| *o == 0.0));
    assert!(w.schedule.omega0().iter().any(|o| *o != 0.0));
    assert_eq!(w.schedule.total(), 30.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let args = ["compile", "--theta", "1.2", "--phi", "0.4", "--A", "0.5", "--T", "25", "--platform", "nv-1q"];
    ok(dir.path(), &args);
    let first = (fs::read(dir.path().join("waveform.txt")).unwrap(), fs::read(dir.path().join("waveform.json")).unwrap());
    ok(dir.path(), &args);
    let second = (fs::read(dir.path().join("waveform.txt")).unwrap(), fs::read(dir.path().join("waveform.json")).unwrap());
    assert_eq!(first, second);
}

#[test]
fn noise_free_simulation_is_exact() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["simulate", "--theta", "2.1", "--phi", "0.7", "--A", "0.6", "--T", "30", "--gamma1", "0", "--gamma2", "0", "--eps", "0,0"],
    );
    let r = json(dir.path().join("result.json"));
    assert!((r["state_fidelity"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!((r["gate_fidelity"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn record_writes_a_physical_trace() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["simulate", "--theta", HALF_PI, "--phi", HALF_PI, "--A", "0.46", "--metric", "state", "--record", "trace.csv"],
    );
    let (header, rows) = csv_rows(dir.path().join("trace.csv"));
    assert_eq!(header[0], "t");
    assert!(rows.len() > 100);
    let t: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    for r in &rows {
        let p: f64 = r[1..4].iter().map(|c| num(c)).sum();
        assert!((p - 1.0).abs() < 1e-8);
    }
}

#[test]
fn reference_simulation_fidelities() {
    let dir = TempDir::new().unwrap();
    let cap = REFERENCE_RABI_CAP.to_string();
    ok(dir.path(), &["simulate", "--theta", HALF_PI, "--phi", HALF_PI, "--A", "0.46", "--rabi-cap", &cap]);
    let r = json(dir.path().join("result.json"));
    let f = r["state_fidelity"].as_f64().unwrap();
    let fg = r["gate_fidelity"].as_f64().unwrap();
    assert!((f - 0.9991).abs() <= 1e-3, "F = {f}");
    assert!((fg - 0.9984).abs() <= 1e-3, "F_G = {fg}");
    assert!(r["code_version"].is_string() && r["config"].is_object());
}

#[test]
fn simulate_reads_a_compiled_waveform() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["compile", "--theta", "1.0", "--phi", "2.0", "--A", "0.5", "--T", "30"]);
    ok(dir.path(), &["simulate", "--waveform", "waveform.txt", "--out", "a.json"]);
    ok(dir.path(), &["simulate", "--theta", "1.0", "--phi", "2.0", "--A", "0.5", "--T", "30", "--out", "b.json"]);
    let (a, b) = (json(dir.path().join("a.json")), json(dir.path().join("b.json")));
    assert_eq!(a["gate_fidelity"], b["gate_fidelity"]);
    assert_eq!(a["state_fidelity"], b["state_fidelity"]);
}

#[test]
fn empty_grid_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["sweep", "--theta", "1", "--phi", "0", "--eps-grid", "-0.2:0.2:0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unknown_platform_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["compile", "--theta", "1", "--phi", "0", "--A", "0.4", "--T", "20", "--platform", "ion-1q"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conflicting_duration_flags_are_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["compile", "--theta", "1", "--phi", "0", "--T", "20", "--rabi-cap", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn area_curve_table() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["sweep", "--fig", "2b", "--amplitudes", "0.2:1.0:9", "--samples", "400"]);
    let (header, rows) = csv_rows(dir.path().join("fig2b.csv"));
    assert_eq!(header, ["amplitude", "pulse_area"]);
    assert_eq!(rows.len(), 9);
    let r = json(dir.path().join("fig2b.json"));
    assert_eq!(r["metadata"]["kind"], "area_vs_amplitude");
}

#[test]
fn min_area_table_has_one_row_per_theta() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["sweep", "--fig", "2c", "--theta-points", "4", "--out-dir", "out"]);
    let (header, rows) = csv_rows(dir.path().join("out/fig2c.csv"));
    assert_eq!(header[..2], ["theta", "min_pulse_area"]);
    assert_eq!(rows.len(), 4);
    for (i, r) in rows.iter().enumerate() {
        assert!((num(&r[0]) - PI * (i + 1) as f64 / 4.0).abs() < 1e-12);
    }
}

#[test]
fn min_area_table_stays_below_pi() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["sweep", "--fig", "2c", "--theta-points", "8"]);
    let (_, rows) = csv_rows(dir.path().join("fig2c.csv"));
    let above: Vec<(f64, f64)> =
        rows.iter().map(|r| (num(&r[0]), num(&r[1]))).filter(|(_, s)| *s > PI + 1e-6).collect();
    assert!(above.is_empty(), "rows above π: {above:?}");
}

#[test]
fn robustness_preset_prefers_noncyclic_scheme() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["sweep", "--fig", "4", "--scheme", "both", "--out-dir", "fig4"]);
    let summary = json(dir.path().join("fig4/fig4.json"));
    let gates = summary["gates"].as_array().unwrap();
    assert_eq!(gates.len(), 2);
    for g in gates {
        let means = &g["means"];
        assert!(means["noncyclic-sta"].as_f64().unwrap() >= means["nhqc"].as_f64().unwrap());
    }
    let grid = json(dir.path().join("fig4/fig4_rx_pi2_nhqc.json"));
    assert_eq!(grid["values"].as_array().unwrap().len(), 41 * 41);
    let (_, rows) = csv_rows(dir.path().join("fig4/fig4_rx_pi4_noncyclic-sta.csv"));
    assert_eq!(rows.len(), 41 * 41);
}

#[test]
fn export_writes_iq_columns() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["compile", "--theta", "1.0", "--phi", "0.3", "--A", "0.5", "--T", "30", "--samples", "1000"]);
    ok(dir.path(), &["export", "--waveform", "waveform.txt", "--out", "iq.csv"]);
    let (header, rows) = csv_rows(dir.path().join("iq.csv"));
    assert_eq!(header, ["t", "i0", "q0", "i1", "q1"]);
    let w = read_waveform_file(&dir.path().join("waveform.txt")).unwrap();
    assert_eq!(rows.len(), w.schedule.len());
    for (r, k) in rows.iter().zip(0..) {
        let (i1, q1) = (num(&r[3]), num(&r[4]));
        assert!((i1.hypot(q1) - w.schedule.omega1()[k].abs()).abs() < 1e-12);
    }
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "theta = 1.0\nphi = 0.5\namplitude = 0.4\ntotal = 20.0\nout = \"from_file.txt\"\n",
    )
    .unwrap();
    ok(dir.path(), &["--config", "run.toml", "compile", "--A", "0.7"]);
    let summary = json(dir.path().join("from_file.json"));
    assert_eq!(summary["amplitude"].as_f64().unwrap(), 0.7);
    assert_eq!(summary["total"].as_f64().unwrap(), 20.0);
    assert_eq!(summary["gate"]["theta"].as_f64().unwrap(), 1.0);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.toml"), "theta = 1.0\nbogus = 3\n").unwrap();
    let out = run(dir.path(), &["--config", "bad.toml", "compile"]);
    assert_eq!(out.status.code(), Some(2));
}
