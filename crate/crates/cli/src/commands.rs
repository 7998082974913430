use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use lambda_holonomy::dynamics::{
    avg_gate_fidelity, propagate_unitary, NoiseModel, RabiErrors, DEFAULT_FIDELITY_STATES, REFERENCE_DECOHERENCE_RATE,
    REFERENCE_RABI_CAP,
};
use lambda_holonomy::gate::{
    compile_at_rabi_cap, compile_nhqc_baseline, compile_noncyclic_gate, minimize_area, pulse_area, target_unitary,
    CompileOptions, Envelope, GateSpec, MinimizeOptions, PulseSchedule, ScheduleOrigin, DEFAULT_SAMPLES_PER_SEGMENT,
};
use lambda_holonomy::io::{
    read_waveform_file, write_iq_csv_file, write_json, write_sweep_csv_file, write_trace_csv_file,
    write_waveform_file,
};
use lambda_holonomy::linalg::{cr, phase_insensitive_overlap, qubit_block, Vec2, EXCITED, QUBIT};
use lambda_holonomy::platform::{map_to_platform, Platform};
use lambda_holonomy::sweeps::{
    area_vs_amplitude, compare, default_eps_grid, default_theta_grid, population_trace, robustness_case,
    robustness_grid, smin_vs_theta, Metric, RobustnessOptions, Scheme, SweepResult, CODE_VERSION,
    DEFAULT_EPS_POINTS, DEFAULT_THETA_POINTS, ENVELOPE_AMPLITUDE, ROBUSTNESS_DURATION,
};

use crate::config::{AmplitudeChoice, Figure, MetricChoice, RunConfig, SchemeChoice};
use crate::CliError;

/// Upper end of the automatic amplitude search.
const AUTO_AMPLITUDE_MAX: f64 = 1.5;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn gate_spec(cfg: &RunConfig) -> Result<GateSpec, CliError> {
    let theta = cfg.theta.ok_or_else(|| usage("missing --theta"))?;
    let phi = cfg.phi.ok_or_else(|| usage("missing --phi"))?;
    Ok(GateSpec::new(theta, phi)?)
}

fn platform(cfg: &RunConfig) -> Result<Option<Platform>, CliError> {
    Ok(cfg.platform.as_deref().map(str::parse).transpose()?)
}

fn noise(cfg: &RunConfig) -> Result<NoiseModel, CliError> {
    let [e0, e1] = cfg.eps.unwrap_or([0.0, 0.0]);
    Ok(NoiseModel::new(
        cfg.gamma1.unwrap_or(REFERENCE_DECOHERENCE_RATE),
        cfg.gamma2.unwrap_or(REFERENCE_DECOHERENCE_RATE),
        e0,
        e1,
    )?)
}

fn samples_for(cfg: &RunConfig, total: f64) -> Result<usize, CliError> {
    match (cfg.dt, cfg.samples_per_segment) {
        (Some(_), Some(_)) => Err(usage("set either dt or samples_per_segment, not both")),
        (Some(dt), None) => {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(usage(format!("dt must be positive, got {dt}")));
            }
            let n = (0.5 * total / dt).ceil() as usize;
            Ok((n + n % 2).max(2))
        }
        (None, Some(n)) => Ok(n),
        (None, None) => Ok(DEFAULT_SAMPLES_PER_SEGMENT),
    }
}

enum Duration {
    Fixed(f64),
    Capped(f64),
}

fn duration(cfg: &RunConfig) -> Result<Duration, CliError> {
    match (cfg.total, cfg.rabi_cap) {
        (Some(_), Some(_)) => Err(usage("set either T or rabi_cap, not both")),
        (Some(t), None) => Ok(Duration::Fixed(t)),
        (None, Some(c)) => Ok(Duration::Capped(c)),
        (None, None) => Ok(Duration::Capped(REFERENCE_RABI_CAP)),
    }
}

/// Noncyclic compile at the configured duration or cap, resampled to `dt` if asked.
fn noncyclic_at(cfg: &RunConfig, spec: &GateSpec, amplitude: f64) -> Result<PulseSchedule, CliError> {
    let opts = |total| samples_for(cfg, total).map(|n| CompileOptions { samples_per_segment: n });
    Ok(match duration(cfg)? {
        Duration::Fixed(t) => compile_noncyclic_gate(spec, amplitude, t, opts(t)?)?,
        Duration::Capped(cap) => {
            let probe = compile_at_rabi_cap(spec, amplitude, cap, CompileOptions::default())?;
            compile_at_rabi_cap(spec, amplitude, cap, opts(probe.total())?)?
        }
    })
}

struct Compiled {
    schedule: PulseSchedule,
    amplitude: f64,
    extra: Value,
}

fn compile_noncyclic(cfg: &RunConfig, spec: &GateSpec) -> Result<Compiled, CliError> {
    let (amplitude, extra) = match cfg.amplitude.unwrap_or(AmplitudeChoice::Auto) {
        AmplitudeChoice::Value(a) => (a, json!({ "amplitude_mode": "fixed" })),
        AmplitudeChoice::Auto => {
            let m = minimize_area(spec.theta, 1.0, (0.0, AUTO_AMPLITUDE_MAX), MinimizeOptions::default())?;
            (
                m.amplitude,
                json!({ "amplitude_mode": "auto", "min_area": m.area, "non_unimodal": m.non_unimodal }),
            )
        }
    };
    Ok(Compiled {
        schedule: noncyclic_at(cfg, spec, amplitude)?,
        amplitude,
        extra,
    })
}

/// Baseline on the `|Ω₁|` envelope of the θ = π/2 reference compile at the same duration setting.
fn compile_nhqc(cfg: &RunConfig, spec: &GateSpec) -> Result<Compiled, CliError> {
    let reference = GateSpec::new(FRAC_PI_2, FRAC_PI_2)?;
    let shape = noncyclic_at(cfg, &reference, ENVELOPE_AMPLITUDE)?;
    Ok(Compiled {
        schedule: compile_nhqc_baseline(spec, &Envelope::from_channel1(&shape))?,
        amplitude: ENVELOPE_AMPLITUDE,
        extra: json!({ "amplitude_mode": "envelope" }),
    })
}

fn compile_scheme(cfg: &RunConfig, spec: &GateSpec, scheme: Scheme) -> Result<Compiled, CliError> {
    match scheme {
        Scheme::Noncyclic => compile_noncyclic(cfg, spec),
        Scheme::Nhqc => compile_nhqc(cfg, spec),
    }
}

fn single_scheme(cfg: &RunConfig) -> Result<Scheme, CliError> {
    match cfg.scheme.unwrap_or(SchemeChoice::Noncyclic) {
        SchemeChoice::Noncyclic => Ok(Scheme::Noncyclic),
        SchemeChoice::Nhqc => Ok(Scheme::Nhqc),
        SchemeChoice::Both => Err(usage("this command takes a single scheme")),
    }
}

fn stamp(cfg: &RunConfig, record: &mut Value) {
    if cfg.timestamp == Some(true) {
        if let Ok(d) = SystemTime::now().duration_since(UNIX_EPOCH) {
            record["timestamp"] = json!(d.as_secs());
        }
    }
}

fn gate_check(spec: &GateSpec, schedule: &PulseSchedule) -> Result<(f64, f64), CliError> {
    let u = propagate_unitary(schedule, RabiErrors::default())?;
    let overlap = phase_insensitive_overlap(&target_unitary(spec), &qubit_block(&u));
    let leakage = QUBIT.iter().map(|&k| u[(EXCITED, k)].norm_sqr()).fold(0.0, f64::max);
    Ok((1.0 - overlap, leakage))
}

fn write_output(path: &Path, value: &Value) -> Result<(), CliError> {
    write_json(path, value)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn compile(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = gate_spec(cfg)?;
    let platform = platform(cfg)?;
    let scheme = single_scheme(cfg)?;
    let c = compile_scheme(cfg, &spec, scheme)?;
    let s = &c.schedule;
    let (infidelity, leakage) = gate_check(&spec, s)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("waveform.txt"));
    let summary_path = cfg.summary.clone().unwrap_or_else(|| out.with_extension("json"));
    if summary_path == out {
        return Err(usage("summary and waveform paths coincide"));
    }
    write_waveform_file(&out, s, platform)?;
    println!("wrote {}", out.display());
    let mut record = json!({
        "command": "compile",
        "code_version": CODE_VERSION,
        "config": cfg,
        "gate": spec,
        "scheme": scheme,
        "amplitude": c.amplitude,
        "total": s.total(),
        "dt": s.dt(),
        "samples_per_segment": s.samples_per_segment(),
        "peak_coupling": s.peak_coupling(),
        "pulse_area": pulse_area(s),
        "gate_infidelity": infidelity,
        "leakage": leakage,
        "waveform": out,
    });
    merge(&mut record, c.extra);
    if let Some(p) = platform {
        record["platform"] = json!(map_to_platform(p));
    }
    stamp(cfg, &mut record);
    write_output(&summary_path, &record)?;
    println!(
        "A = {:.6}  T = {:.4} ns  S = {:.6}  1 - F_gate = {:.2e}",
        c.amplitude,
        s.total(),
        pulse_area(s),
        infidelity
    );
    Ok(())
}

fn merge(record: &mut Value, extra: Value) {
    if let (Value::Object(r), Value::Object(e)) = (record, extra) {
        r.extend(e);
    }
}

fn spec_from_origin(cfg: &RunConfig, schedule: &PulseSchedule) -> Result<GateSpec, CliError> {
    match schedule.origin() {
        ScheduleOrigin::Noncyclic(p) => Ok(GateSpec::new(p.theta, p.phi)?),
        ScheduleOrigin::Nhqc { theta, phi } => Ok(GateSpec::new(*theta, *phi)?),
        ScheduleOrigin::External => gate_spec(cfg),
    }
}

pub fn simulate(cfg: &RunConfig, waveform: Option<&Path>, psi0_angle: f64) -> Result<(), CliError> {
    let (spec, schedule, amplitude, scheme) = match waveform {
        Some(path) => {
            let w = read_waveform_file(path)?;
            let spec = spec_from_origin(cfg, &w.schedule)?;
            let (amplitude, scheme) = match w.schedule.origin() {
                ScheduleOrigin::Noncyclic(p) => (Some(p.amplitude), Some(Scheme::Noncyclic)),
                ScheduleOrigin::Nhqc { .. } => (None, Some(Scheme::Nhqc)),
                ScheduleOrigin::External => (None, None),
            };
            (spec, w.schedule, amplitude, scheme)
        }
        None => {
            let spec = gate_spec(cfg)?;
            let scheme = single_scheme(cfg)?;
            let c = compile_scheme(cfg, &spec, scheme)?;
            (spec, c.schedule, Some(c.amplitude), Some(scheme))
        }
    };
    let noise = noise(cfg)?;
    let metric = cfg.metric.unwrap_or(MetricChoice::Both);
    let mut record = json!({
        "command": "simulate",
        "code_version": CODE_VERSION,
        "config": cfg,
        "gate": spec,
        "scheme": scheme,
        "amplitude": amplitude,
        "total": schedule.total(),
        "samples_per_segment": schedule.samples_per_segment(),
        "noise": noise,
    });
    if matches!(metric, MetricChoice::State | MetricChoice::Both) || cfg.record.is_some() {
        let (s, c) = psi0_angle.sin_cos();
        let psi0 = Vec2::new(cr(c), cr(s));
        let trace = population_trace(&spec, &schedule, &psi0, &noise)?;
        let last = trace.last().ok_or_else(|| usage("empty schedule"))?;
        record["psi0_angle"] = json!(psi0_angle);
        record["state_fidelity"] = json!(last.fidelity);
        record["final_populations"] = json!([last.p0, last.pe, last.p1]);
        println!("state fidelity F = {:.6}", last.fidelity);
        if let Some(path) = &cfg.record {
            write_trace_csv_file(path, &trace)?;
            println!("wrote {}", path.display());
        }
    }
    if matches!(metric, MetricChoice::Gate | MetricChoice::Both) {
        let n = cfg.fidelity_states.unwrap_or(DEFAULT_FIDELITY_STATES);
        let fg = avg_gate_fidelity(&spec, &schedule, &noise, n)?;
        record["gate_fidelity"] = json!(fg);
        record["fidelity_states"] = json!(n);
        println!("gate fidelity F_G = {fg:.6}");
    }
    stamp(cfg, &mut record);
    write_output(&cfg.out.clone().unwrap_or_else(|| PathBuf::from("result.json")), &record)
}

fn label(spec: &GateSpec) -> String {
    let near = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let axis = if near(spec.phi, FRAC_PI_2) {
        "rx".to_owned()
    } else if near(spec.phi, 0.0) {
        "ry".to_owned()
    } else {
        format!("phi{:.4}", spec.phi)
    };
    let angle = if near(spec.theta, FRAC_PI_2) {
        "pi2".to_owned()
    } else if near(spec.theta, FRAC_PI_4) {
        "pi4".to_owned()
    } else {
        format!("theta{:.4}", spec.theta)
    };
    format!("{axis}_{angle}")
}

struct SweepOut {
    dir: PathBuf,
    stamp: bool,
}

impl SweepOut {
    fn save(&self, name: &str, result: SweepResult) -> Result<SweepResult, CliError> {
        let result = if self.stamp { result.stamped() } else { result };
        let json_path = self.dir.join(format!("{name}.json"));
        let csv_path = self.dir.join(format!("{name}.csv"));
        write_json(&json_path, &result)?;
        write_sweep_csv_file(&csv_path, &result)?;
        println!("wrote {} and {}", json_path.display(), csv_path.display());
        Ok(result)
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let out = SweepOut {
        dir,
        stamp: cfg.timestamp == Some(true),
    };
    let workers = cfg.workers.unwrap_or(0);
    let samples = samples_for(cfg, cfg.total.unwrap_or(ROBUSTNESS_DURATION))?;
    let compile = CompileOptions { samples_per_segment: samples };
    match cfg.figure {
        Some(Figure::AreaCurve) => {
            let theta = cfg.theta.unwrap_or(FRAC_PI_2);
            let grid = cfg.amplitude_grid.map(|g| g.values()).unwrap_or_else(|| {
                lambda_holonomy::sweeps::linspace(0.05, AUTO_AMPLITUDE_MAX, 30)
            });
            let total = cfg.total.unwrap_or(ROBUSTNESS_DURATION);
            let r = out.save("fig2b", area_vs_amplitude(theta, total, &grid, compile, workers)?)?;
            if let Some((i, s)) = r.argmin() {
                println!("minimum on grid: S = {s:.6} at A = {:.4}", grid[i]);
            }
            Ok(())
        }
        Some(Figure::MinAreaCurve) => {
            let thetas = default_theta_grid(cfg.theta_grid_points.unwrap_or(DEFAULT_THETA_POINTS));
            let opts = MinimizeOptions {
                compile,
                ..Default::default()
            };
            let r = out.save("fig2c", smin_vs_theta(&thetas, AUTO_AMPLITUDE_MAX, opts, workers)?)?;
            let present: Vec<f64> = r.values.iter().flatten().copied().collect();
            let above = present.iter().filter(|s| **s > PI + 1e-6).count();
            println!(
                "mean S_min = {:.6}, max S_min = {:.6}, {above} of {} above π",
                r.mean().unwrap_or(f64::NAN),
                present.iter().copied().fold(f64::NAN, f64::max),
                present.len()
            );
            Ok(())
        }
        Some(Figure::Populations) => populations(cfg, &out),
        Some(Figure::RobustnessX) => robustness(cfg, &out, "fig4", &[(FRAC_PI_2, FRAC_PI_2), (FRAC_PI_4, FRAC_PI_2)]),
        Some(Figure::RobustnessY) => robustness(cfg, &out, "fig5", &[(FRAC_PI_2, 0.0), (FRAC_PI_4, 0.0)]),
        None => {
            let spec = gate_spec(cfg)?;
            robustness(cfg, &out, "robustness", &[(spec.theta, spec.phi)])
        }
    }
}

fn populations(cfg: &RunConfig, out: &SweepOut) -> Result<(), CliError> {
    let noise = noise(cfg)?;
    let mut rows = Vec::new();
    for (theta, amplitude) in [(FRAC_PI_2, 0.46), (FRAC_PI_4, 0.38)] {
        let spec = GateSpec::rx(theta)?;
        let gate_cfg = RunConfig {
            amplitude: Some(AmplitudeChoice::Value(amplitude)),
            ..cfg.clone()
        };
        let c = compile_noncyclic(&gate_cfg, &spec)?;
        let psi0 = Vec2::new(cr(1.0), cr(0.0));
        let trace = population_trace(&spec, &c.schedule, &psi0, &noise)?;
        let path = out.dir.join(format!("fig3_{}.csv", label(&spec)));
        write_trace_csv_file(&path, &trace)?;
        println!("wrote {}", path.display());
        let last = trace.last().ok_or_else(|| usage("empty schedule"))?;
        println!("{}: F(T) = {:.6}", label(&spec), last.fidelity);
        rows.push(json!({
            "gate": spec,
            "amplitude": amplitude,
            "total": c.schedule.total(),
            "final_fidelity": last.fidelity,
            "final_populations": [last.p0, last.pe, last.p1],
            "trace": path,
        }));
    }
    let mut record = json!({ "figure": "3", "code_version": CODE_VERSION, "noise": noise, "gates": rows });
    stamp(cfg, &mut record);
    write_output(&out.dir.join("fig3.json"), &record)
}

fn robustness(cfg: &RunConfig, out: &SweepOut, prefix: &str, gates: &[(f64, f64)]) -> Result<(), CliError> {
    let eps = cfg
        .eps_grid
        .map(|g| g.values())
        .unwrap_or_else(|| default_eps_grid(DEFAULT_EPS_POINTS));
    if eps.is_empty() {
        return Err(usage("the Rabi-error grid is empty"));
    }
    let metric = match cfg.metric.unwrap_or(MetricChoice::Gate) {
        MetricChoice::Gate => Metric::Gate,
        MetricChoice::State => Metric::State,
        MetricChoice::Both => return Err(usage("sweeps take a single metric")),
    };
    let schemes: Vec<Scheme> = match cfg.scheme.unwrap_or(SchemeChoice::Both) {
        SchemeChoice::Noncyclic => vec![Scheme::Noncyclic],
        SchemeChoice::Nhqc => vec![Scheme::Nhqc],
        SchemeChoice::Both => vec![Scheme::Noncyclic, Scheme::Nhqc],
    };
    let total = cfg.total.unwrap_or(ROBUSTNESS_DURATION);
    let opts = RobustnessOptions {
        total,
        minimize: MinimizeOptions {
            compile: CompileOptions {
                samples_per_segment: samples_for(cfg, total)?,
            },
            ..Default::default()
        },
        ..Default::default()
    };
    let noise = noise(cfg)?;
    let workers = cfg.workers.unwrap_or(0);
    let mut rows = Vec::new();
    for &(theta, phi) in gates {
        let spec = GateSpec::new(theta, phi)?;
        let mut grids = Vec::new();
        for &scheme in &schemes {
            let case = robustness_case(&spec, scheme, opts)?;
            let grid = robustness_grid(&case, &eps, &eps, &noise, metric, workers)?;
            let name = format!("{prefix}_{}_{}", label(&spec), scheme.tag());
            let grid = out.save(&name, grid)?;
            println!(
                "{} {}: mean = {:.6}, missing = {}",
                label(&spec),
                scheme.tag(),
                grid.mean().unwrap_or(f64::NAN),
                grid.missing()
            );
            grids.push(grid);
        }
        let mut row = json!({ "gate": spec, "means": {} });
        for g in &grids {
            let tag = g.metadata.scheme.map(|s| s.tag()).unwrap_or_default();
            row["means"][tag] = json!(g.mean());
        }
        if let [a, b] = grids.as_slice() {
            let c = compare(a, b)?;
            println!(
                "{}: noncyclic mean {:.6} vs nhqc mean {:.6}, win fraction {:.3}",
                label(&spec),
                c.mean_a,
                c.mean_b,
                c.win_fraction
            );
            row["comparison"] = json!(c);
        }
        rows.push(row);
    }
    let mut record = json!({
        "kind": prefix,
        "code_version": CODE_VERSION,
        "metric": metric,
        "noise": noise,
        "eps_grid": eps,
        "gates": rows,
    });
    stamp(cfg, &mut record);
    write_output(&out.dir.join(format!("{prefix}.json")), &record)
}

pub fn export(waveform: &Path, out: &Path) -> Result<(), CliError> {
    let w = read_waveform_file(waveform)?;
    write_iq_csv_file(out, &w.schedule)?;
    println!("wrote {}", out.display());
    Ok(())
}
