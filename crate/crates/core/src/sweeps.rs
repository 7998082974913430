//! Batch experiments: area curves, minimum-area curves, Rabi-error robustness grids
//! and population traces.
//!
//! Every cell is independent and evaluated on a rayon pool; results are collected in
//! grid order, so parallel and serial runs agree bit for bit.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    avg_gate_fidelity_from_map, lindblad_evolve, lindblad_superoperator, DensityMatrix3, NoiseModel,
    DEFAULT_FIDELITY_STATES,
};
use crate::error::{Error, Result};
use crate::gate::{
    area_for_amplitude, compile_nhqc_baseline, compile_noncyclic_gate, matched_area_amplitude, minimize_area,
    target_unitary, CompileOptions, Envelope, GateSpec, MinimizeOptions, PulseSchedule,
};
use crate::linalg::{embed_qubit, Vec2};

/// Duration of the robustness schedules (ns).
pub const ROBUSTNESS_DURATION: f64 = 29.5;
/// Amplitude of the θ = π/2 compile whose `|Ω₁|` shapes the baseline.
pub const ENVELOPE_AMPLITUDE: f64 = 0.46;
/// Edge of the default Rabi-error grid.
pub const EPS_RANGE: f64 = 0.2;
pub const DEFAULT_EPS_POINTS: usize = 41;
pub const DEFAULT_THETA_POINTS: usize = 33;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `points` values evenly spaced over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `[−0.2, 0.2]` with `points` values.
pub fn default_eps_grid(points: usize) -> Vec<f64> {
    linspace(-EPS_RANGE, EPS_RANGE, points)
}

/// `θ_i = π i / points`, `i = 1..=points`.
pub fn default_theta_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| PI * i as f64 / points as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "noncyclic-sta")]
    Noncyclic,
    #[serde(rename = "nhqc")]
    Nhqc,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Noncyclic => "noncyclic-sta",
            Scheme::Nhqc => "nhqc",
        }
    }
}

/// Which fidelity a grid cell reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// State fidelity for the input `|0⟩`.
    State,
    /// Real-superposition average gate fidelity.
    Gate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_owned(),
            values,
        }
    }
}

/// Everything needed to re-run any single cell.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub kind: String,
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
    pub samples_per_segment: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_states: Option<usize>,
    pub code_version: String,
    /// Unix seconds; absent unless requested, so repeated runs stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    /// Summary statistics and other scalar annotations.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, f64>,
}

/// Dense row-major values over the product of `axes`; failed cells are `None`.
///
/// `aux` holds further per-cell quantities aligned with `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub values: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, Vec<Option<f64>>>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    /// Values at the given multi-index.
    pub fn get(&self, index: &[usize]) -> Option<f64> {
        let flat = index
            .iter()
            .zip(self.shape())
            .fold(0, |acc, (&i, len)| acc * len + i);
        self.values.get(flat).copied().flatten()
    }

    /// Mean over the cells that evaluated.
    pub fn mean(&self) -> Option<f64> {
        let present: Vec<f64> = self.values.iter().flatten().copied().collect();
        (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
    }

    pub fn missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Index and value of the smallest present cell.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn stamped(mut self) -> Self {
        self.metadata.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        self
    }

    fn check(&self) -> Result<()> {
        let cells: usize = self.shape().iter().product();
        if cells != self.values.len() || self.aux.values().any(|v| v.len() != cells) {
            return Err(Error::Numerical("sweep values do not match the axis shape".into()));
        }
        Ok(())
    }
}

/// Worker pool of the given width; 0 picks rayon's default.
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))
}

fn par_map<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    Ok(worker_pool(workers)?.install(|| (0..n).into_par_iter().map(f).collect()))
}

fn nonempty(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain(format!("{name} grid is empty")));
    }
    Ok(())
}

/// `S(A)` for fixed θ; amplitudes that fail to compile are recorded as missing.
pub fn area_vs_amplitude(
    theta: f64,
    total: f64,
    amplitudes: &[f64],
    opts: CompileOptions,
    workers: usize,
) -> Result<SweepResult> {
    nonempty("amplitude", amplitudes)?;
    GateSpec::new(theta, 0.0)?;
    let values = par_map(workers, amplitudes.len(), |i| {
        area_for_amplitude(theta, amplitudes[i], total, opts).ok()
    })?;
    let mut result = SweepResult {
        axes: vec![Axis::new("amplitude", amplitudes.to_vec())],
        values,
        aux: BTreeMap::new(),
        metadata: SweepMetadata {
            kind: "area_vs_amplitude".into(),
            quantity: "pulse_area".into(),
            gate: Some(GateSpec::new(theta, 0.0)?),
            total: Some(total),
            samples_per_segment: opts.samples_per_segment,
            code_version: CODE_VERSION.into(),
            ..Default::default()
        },
    };
    if let Some((i, s)) = result.argmin() {
        result.metadata.summary.insert("argmin_amplitude".into(), amplitudes[i]);
        result.metadata.summary.insert("min_area".into(), s);
    }
    result.check()?;
    Ok(result)
}

/// Minimum area and minimizing amplitude for each θ, searched over `A ∈ (0, amplitude_max]`.
///
/// `values` holds `S_min`; `aux["amplitude"]` holds `A*`.
pub fn smin_vs_theta(
    thetas: &[f64],
    amplitude_max: f64,
    opts: MinimizeOptions,
    workers: usize,
) -> Result<SweepResult> {
    nonempty("theta", thetas)?;
    if let Some(bad) = thetas.iter().find(|t| !(**t > 0.0 && **t <= PI)) {
        return Err(Error::Domain(format!("θ grid must lie in (0, π], got {bad}")));
    }
    let minima = par_map(workers, thetas.len(), |i| {
        minimize_area(thetas[i], 1.0, (0.0, amplitude_max), opts).ok()
    })?;
    let values: Vec<Option<f64>> = minima.iter().map(|m| m.as_ref().map(|m| m.area)).collect();
    let amplitude = minima.iter().map(|m| m.as_ref().map(|m| m.amplitude)).collect();
    let non_unimodal = minima
        .iter()
        .map(|m| m.as_ref().map(|m| f64::from(u8::from(m.non_unimodal))))
        .collect();
    let mut result = SweepResult {
        axes: vec![Axis::new("theta", thetas.to_vec())],
        values,
        aux: BTreeMap::from([("amplitude".to_owned(), amplitude), ("non_unimodal".to_owned(), non_unimodal)]),
        metadata: SweepMetadata {
            kind: "smin_vs_theta".into(),
            quantity: "min_pulse_area".into(),
            samples_per_segment: opts.compile.samples_per_segment,
            code_version: CODE_VERSION.into(),
            ..Default::default()
        },
    };
    if let Some(mean) = result.mean() {
        result.metadata.summary.insert("mean_min_area".into(), mean);
    }
    result.metadata.summary.insert("amplitude_max".into(), amplitude_max);
    result.check()?;
    Ok(result)
}

/// A compiled schedule for one scheme, ready for a robustness grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessCase {
    pub spec: GateSpec,
    pub scheme: Scheme,
    /// Noncyclic amplitude, or the envelope amplitude for the baseline.
    pub amplitude: f64,
    pub schedule: PulseSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessOptions {
    pub total: f64,
    pub envelope_amplitude: f64,
    pub minimize: MinimizeOptions,
}

impl Default for RobustnessOptions {
    fn default() -> Self {
        Self {
            total: ROBUSTNESS_DURATION,
            envelope_amplitude: ENVELOPE_AMPLITUDE,
            minimize: MinimizeOptions::default(),
        }
    }
}

/// Area-matched schedules: the noncyclic gate at the `S = π` amplitude below `A*`,
/// the baseline on the `|Ω₁|` envelope of the θ = π/2 reference compile. Both share
/// the duration and sampling.
pub fn robustness_case(spec: &GateSpec, scheme: Scheme, opts: RobustnessOptions) -> Result<RobustnessCase> {
    let compile = opts.minimize.compile;
    let (amplitude, schedule) = match scheme {
        Scheme::Noncyclic => {
            let a = matched_area_amplitude(spec.theta, PI, opts.minimize)?;
            (a, compile_noncyclic_gate(spec, a, opts.total, compile)?)
        }
        Scheme::Nhqc => {
            let reference = GateSpec::new(FRAC_PI_2, FRAC_PI_2)?;
            let shape = compile_noncyclic_gate(&reference, opts.envelope_amplitude, opts.total, compile)?;
            let envelope = Envelope::from_channel1(&shape);
            (opts.envelope_amplitude, compile_nhqc_baseline(spec, &envelope)?)
        }
    };
    Ok(RobustnessCase {
        spec: *spec,
        scheme,
        amplitude,
        schedule,
    })
}

/// Fidelity over the `(ε₀, ε₁)` grid, `ε₀` along the first axis. Gate fidelities go
/// through one superoperator per cell; failing cells are recorded as missing.
pub fn robustness_grid(
    case: &RobustnessCase,
    eps0: &[f64],
    eps1: &[f64],
    noise: &NoiseModel,
    metric: Metric,
    workers: usize,
) -> Result<SweepResult> {
    nonempty("eps0", eps0)?;
    nonempty("eps1", eps1)?;
    let target = target_unitary(&case.spec);
    let psi0 = Vec2::new(crate::linalg::cr(1.0), crate::linalg::cr(0.0));
    let rho0 = embed_qubit(&psi0) * embed_qubit(&psi0).adjoint();
    let psi_f = target * psi0;
    let rates = NoiseModel::new(noise.gamma1, noise.gamma2, 0.0, 0.0)?;
    let cell = |i: usize| -> Result<f64> {
        let cell_noise = rates.with_errors(eps0[i / eps1.len()], eps1[i % eps1.len()])?;
        let map = lindblad_superoperator(&case.schedule, &cell_noise)?;
        let f = match metric {
            Metric::Gate => avg_gate_fidelity_from_map(&map, &target, DEFAULT_FIDELITY_STATES)?,
            Metric::State => {
                let v = embed_qubit(&psi_f);
                v.dotc(&(map.apply(&rho0) * v)).re
            }
        };
        Ok(f.clamp(0.0, 1.0))
    };
    let values = par_map(workers, eps0.len() * eps1.len(), |i| cell(i).ok())?;
    let mut result = SweepResult {
        axes: vec![Axis::new("eps0", eps0.to_vec()), Axis::new("eps1", eps1.to_vec())],
        values,
        aux: BTreeMap::new(),
        metadata: SweepMetadata {
            kind: "robustness_grid".into(),
            quantity: match metric {
                Metric::Gate => "gate_fidelity",
                Metric::State => "state_fidelity",
            }
            .into(),
            gate: Some(case.spec),
            scheme: Some(case.scheme),
            noise: Some(rates),
            metric: Some(metric),
            amplitude: Some(case.amplitude),
            total: Some(case.schedule.total()),
            samples_per_segment: case.schedule.samples_per_segment(),
            fidelity_states: (metric == Metric::Gate).then_some(DEFAULT_FIDELITY_STATES),
            code_version: CODE_VERSION.into(),
            ..Default::default()
        },
    };
    if let Some(mean) = result.mean() {
        result.metadata.summary.insert("mean".into(), mean);
    }
    result.check()?;
    Ok(result)
}

/// Grid-mean comparison of two robustness grids over the same axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub mean_a: f64,
    pub mean_b: f64,
    /// Fraction of cells where `a` is strictly better, over cells present in both.
    pub win_fraction: f64,
}

pub fn compare(a: &SweepResult, b: &SweepResult) -> Result<Comparison> {
    if a.axes != b.axes {
        return Err(Error::Domain("grids have different axes".into()));
    }
    let pairs: Vec<(f64, f64)> = a
        .values
        .iter()
        .zip(&b.values)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::Numerical("no cell evaluated in both grids".into()));
    }
    let n = pairs.len() as f64;
    Ok(Comparison {
        mean_a: pairs.iter().map(|p| p.0).sum::<f64>() / n,
        mean_b: pairs.iter().map(|p| p.1).sum::<f64>() / n,
        win_fraction: pairs.iter().filter(|p| p.0 > p.1).count() as f64 / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub p0: f64,
    pub pe: f64,
    pub p1: f64,
    /// Overlap with the ideal final state `R[θ, φ]|ψ₀⟩`.
    pub fidelity: f64,
}

/// Populations and target-state fidelity at the start of every integrator step and at `T`.
pub fn population_trace(
    spec: &GateSpec,
    schedule: &PulseSchedule,
    psi0: &Vec2,
    noise: &NoiseModel,
) -> Result<Vec<TracePoint>> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("initial state must be normalised, got norm {norm}")));
    }
    let rho0 = DensityMatrix3::pure(&embed_qubit(psi0))?;
    let out = lindblad_evolve(schedule, &rho0, noise, true)?;
    let v = embed_qubit(&(target_unitary(spec) * psi0));
    let record = out.record.unwrap_or_default();
    Ok(record
        .iter()
        .map(|snap| TracePoint {
            t: snap.t,
            p0: snap.rho[(0, 0)].re,
            pe: snap.rho[(1, 1)].re,
            p1: snap.rho[(2, 2)].re,
            fidelity: v.dotc(&(snap.rho * v)).re,
        })
        .collect())
}
