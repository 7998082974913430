use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::schedule::{pulse_area, scale_to_rabi_cap, PulseSchedule, ScheduleOrigin, DEFAULT_SAMPLES_PER_SEGMENT};
use super::GateSpec;
use crate::error::{Error, Result};
use crate::invariant::{couplings_from_invariant, invariant_residual, GateProfiles, Segment};
use crate::search::{bisect, count_local_minima, golden_section};

/// |γ| must stay below π so `sin γ` only vanishes at segment boundaries.
pub const MAX_AMPLITUDE: f64 = PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Samples per half; must be even.
    pub samples_per_segment: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            samples_per_segment: DEFAULT_SAMPLES_PER_SEGMENT,
        }
    }
}

/// Samples the inverse-engineered couplings for `spec` on both segments.
///
/// The second segment's drive phase is `φ + π`, which swaps the `|φ±⟩` channels.
pub fn compile_noncyclic_gate(
    spec: &GateSpec,
    amplitude: f64,
    total: f64,
    opts: CompileOptions,
) -> Result<PulseSchedule> {
    let n = opts.samples_per_segment;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("samples per segment must be even and ≥ 2, got {n}")));
    }
    if amplitude >= MAX_AMPLITUDE {
        return Err(Error::Compile(format!(
            "amplitude A = {amplitude} drives γ through a zero of sin γ inside a segment"
        )));
    }
    let profiles = GateProfiles::new(spec.theta, spec.phi, amplitude, total)?;
    let len = 2 * n + 1;
    let mut omega0 = Vec::with_capacity(len);
    let mut omega1 = Vec::with_capacity(len);
    for k in 0..len {
        let t = total * (k as f64 / (2 * n) as f64);
        let segment = if k <= n { Segment::First } else { Segment::Second };
        let params = profiles.params_at(t, segment)?;
        let (o0, o1) = couplings_from_invariant(&params).map_err(|e| Error::Compile(format!("t = {t} ns: {e}")))?;
        if !(o0.is_finite() && o1.is_finite()) {
            return Err(Error::Compile(format!("non-finite coupling at t = {t} ns")));
        }
        omega0.push(o0);
        omega1.push(o1);
    }
    PulseSchedule::new(
        total,
        omega0,
        omega1,
        [0.0; 2],
        [profiles.segment_phase(Segment::First), profiles.segment_phase(Segment::Second)],
        ScheduleOrigin::Noncyclic(profiles),
    )
}

/// Compiles at a nominal duration, then stretches so `max_k max_t |Ω_k|/2 = rabi_cap`.
///
/// The gate and the sampled shape are independent of the nominal duration, so this
/// is the same schedule `compile_noncyclic_gate` would give at the capped duration.
pub fn compile_at_rabi_cap(spec: &GateSpec, amplitude: f64, rabi_cap: f64, opts: CompileOptions) -> Result<PulseSchedule> {
    let nominal = compile_noncyclic_gate(spec, amplitude, 1.0, opts)?;
    scale_to_rabi_cap(&nominal, rabi_cap)
}

/// Invariant residual at sample `k` of an inverse-engineered schedule, using the
/// schedule's stored couplings and the analytic parameter trajectory it came from.
pub fn schedule_invariant_residual(schedule: &PulseSchedule, k: usize) -> Result<f64> {
    let ScheduleOrigin::Noncyclic(profiles) = schedule.origin() else {
        return Err(Error::Domain("invariant residual needs an inverse-engineered schedule".into()));
    };
    if k >= schedule.len() {
        return Err(Error::Domain(format!("sample {k} out of range")));
    }
    let segment = schedule.segment_of(k);
    let params = profiles.params_at(schedule.time(k), segment)?;
    Ok(invariant_residual(&params, &schedule.hamiltonian(k, segment)))
}

/// `S(A)` for fixed θ and T. The area does not depend on T or φ.
pub fn area_for_amplitude(theta: f64, amplitude: f64, total: f64, opts: CompileOptions) -> Result<f64> {
    let spec = GateSpec::new(theta, 0.0)?;
    Ok(pulse_area(&compile_noncyclic_gate(&spec, amplitude, total, opts)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Coarse grid points spread over `(lo, hi]`.
    pub grid_points: usize,
    /// Golden-section stopping width on A.
    pub amplitude_tol: f64,
    pub compile: CompileOptions,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            grid_points: 60,
            amplitude_tol: 1e-4,
            compile: CompileOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaMinimum {
    pub amplitude: f64,
    pub area: f64,
    /// More than one interior minimum on the coarse grid; the result is the global grid minimum refined locally.
    pub non_unimodal: bool,
    pub grid: Vec<(f64, Option<f64>)>,
}

/// Minimizes the pulse area over the amplitude `A ∈ (lo, hi]` by a coarse scan
/// followed by golden-section refinement around the best grid point.
pub fn minimize_area(theta: f64, total: f64, range: (f64, f64), opts: MinimizeOptions) -> Result<AreaMinimum> {
    let (lo, hi) = range;
    if !(lo >= 0.0 && hi > lo && hi < MAX_AMPLITUDE) {
        return Err(Error::Domain(format!("amplitude range ({lo}, {hi}] must lie in (0, π)")));
    }
    if opts.grid_points < 3 {
        return Err(Error::Domain("need at least 3 grid points".into()));
    }
    let m = opts.grid_points;
    let grid: Vec<f64> = (1..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
    let area = |a: f64| area_for_amplitude(theta, a, total, opts.compile);
    let values: Vec<Option<f64>> = grid.iter().map(|&a| area(a).ok()).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Compile(format!("no amplitude in ({lo}, {hi}] compiled")))?;
    let non_unimodal = count_local_minima(&values) > 1;
    let left = if best == 0 { lo.max(1e-6) } else { grid[best - 1] };
    let right = grid[(best + 1).min(m - 1)];
    let refined = golden_section(area, left, right, opts.amplitude_tol)?;
    let (amplitude, area_min) = match values[best] {
        Some(v) if v < refined.value => (grid[best], v),
        _ => (refined.x, refined.value),
    };
    Ok(AreaMinimum {
        amplitude,
        area: area_min,
        non_unimodal,
        grid: grid.into_iter().zip(values).collect(),
    })
}

/// Smallest-amplitude solution of `S(A) = target` below the area minimum.
///
/// `S` diverges as `A → 0`, so the branch left of the minimizer brackets the root
/// whenever the minimum lies below the target.
pub fn matched_area_amplitude(theta: f64, target: f64, opts: MinimizeOptions) -> Result<f64> {
    let total = 1.0;
    let min = minimize_area(theta, total, (0.0, MATCH_SEARCH_MAX), opts)?;
    if min.area > target {
        return Err(Error::Compile(format!(
            "no amplitude reaches S = {target} for θ = {theta}: minimum area is {} at A = {}",
            min.area, min.amplitude
        )));
    }
    let lo = MATCH_SEARCH_MIN.min(0.5 * min.amplitude);
    bisect(
        |a| Ok(area_for_amplitude(theta, a, total, opts.compile)? - target),
        lo,
        min.amplitude,
        opts.amplitude_tol * 1e-3,
    )
}

const MATCH_SEARCH_MIN: f64 = 0.02;
const MATCH_SEARCH_MAX: f64 = 1.5;
