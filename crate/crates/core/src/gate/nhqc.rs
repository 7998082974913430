//! Conventional single-loop nonadiabatic holonomic baseline.
//!
//! Both couplings share one envelope, so the drive only ever talks to the bright
//! state `|b⟩ = (|0⟩ + e^{i(φ−π/2)}|1⟩)/√2`. Each half carries Rabi area π: the first
//! half sends `|b⟩ → |e⟩`, the second returns it with a common phase χ on both
//! channels, leaving `|b⟩ → e^{i(χ+π)}|b⟩` and the dark state untouched. With
//! χ = θ − π this is `R[θ, φ]` up to a global phase.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use super::schedule::{simpson, PulseSchedule, ScheduleOrigin};
use super::{target_unitary, GateSpec};
use crate::dynamics::{propagate_unitary, RabiErrors};
use crate::error::{Error, Result};
use crate::invariant::Segment;
use crate::linalg::{phase_insensitive_overlap, qubit_block};

/// Gate-equivalence tolerance checked at compile time.
const BASELINE_GATE_TOL: f64 = 1e-6;

/// A nonnegative pulse shape sampled on the same `2n + 1` grid as a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub total: f64,
    pub values: Vec<f64>,
}

impl Envelope {
    /// `|Ω₁(t)|` of an existing schedule.
    pub fn from_channel1(schedule: &PulseSchedule) -> Self {
        Self {
            total: schedule.total(),
            values: schedule.omega1().iter().map(|v| v.abs()).collect(),
        }
    }
}

/// Builds the single-loop schedule for `spec` with each half of `envelope` renormalised to area π.
pub fn compile_nhqc_baseline(spec: &GateSpec, envelope: &Envelope) -> Result<PulseSchedule> {
    let len = envelope.values.len();
    if len < 5 || len % 4 != 1 {
        return Err(Error::Domain(format!("envelope needs 2n+1 samples with n even, got {len}")));
    }
    if envelope.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Domain("envelope must be finite and nonnegative".into()));
    }
    let n = (len - 1) / 2;
    let h = envelope.total / (2 * n) as f64;
    let first = simpson(&envelope.values[..=n], h);
    let second = simpson(&envelope.values[n..], h);
    if !(first > 0.0 && second > 0.0) {
        return Err(Error::Domain("envelope has zero area on a half".into()));
    }
    let rabi: Vec<f64> = envelope
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| match k.cmp(&n) {
            std::cmp::Ordering::Less => v * PI / first,
            std::cmp::Ordering::Greater => v * PI / second,
            std::cmp::Ordering::Equal => 0.0,
        })
        .collect();
    let channel: Vec<f64> = rabi.iter().map(|v| v * FRAC_1_SQRT_2).collect();

    let chi = spec.theta - PI;
    let bright = spec.phi - FRAC_PI_2;
    let schedule = PulseSchedule::new(
        envelope.total,
        channel.clone(),
        channel,
        [0.0, chi],
        [bright, bright + chi],
        ScheduleOrigin::Nhqc {
            theta: spec.theta,
            phi: spec.phi,
        },
    )?;

    let u = propagate_unitary(&schedule, RabiErrors::default())?;
    let overlap = phase_insensitive_overlap(&target_unitary(spec), &qubit_block(&u));
    if overlap < 1.0 - BASELINE_GATE_TOL {
        return Err(Error::Compile(format!(
            "baseline gate check failed: overlap {overlap} (segment phases {:?})",
            [schedule.phase(Segment::First), schedule.phase(Segment::Second)]
        )));
    }
    Ok(schedule)
}
