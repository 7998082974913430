//! Lewis–Riesenfeld phases of the dressed channels and the resulting evolution operator.

use super::{dressed_states_at, GateProfiles, Segment};
use crate::error::Result;
use crate::linalg::{expi, Mat3};
use crate::quadrature::{integrate, QuadratureOptions};

/// Phases accumulated on `|φ₊⟩` and `|φ₋⟩` since the start of a segment (`α₀ ≡ 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrPhases {
    pub plus: f64,
    pub minus: f64,
}

/// `β̇ / sin γ`, continued by its limit (0) where `γ = 0`.
fn phase_rate(profiles: &GateProfiles, t: f64, segment: Segment) -> f64 {
    match profiles.params_at(t, segment) {
        Ok(p) if p.gamma != 0.0 => p.beta_dot / p.gamma.sin(),
        _ => 0.0,
    }
}

/// `∫ β̇/sin γ dt` from the segment start to `t_end`.
fn phase_integral(profiles: &GateProfiles, segment: Segment, t_end: f64, opts: QuadratureOptions) -> Result<f64> {
    let (start, _) = segment.bounds(profiles.total);
    // Validates t_end against the segment.
    profiles.params_at(t_end, segment)?;
    Ok(integrate(|t| phase_rate(profiles, t, segment), start, t_end, opts)?.value)
}

/// Integral of `β̇/sin γ` over a whole segment.
pub fn segment_phase_integral(profiles: &GateProfiles, segment: Segment) -> Result<f64> {
    let (_, end) = segment.bounds(profiles.total);
    phase_integral(profiles, segment, end, QuadratureOptions::default())
}

/// `α±(t_end) = ∓∫ β̇/sin γ dt`, integrated from the start of `segment`.
pub fn lr_phase(profiles: &GateProfiles, segment: Segment, t_end: f64) -> Result<LrPhases> {
    let integral = phase_integral(profiles, segment, t_end, QuadratureOptions::default())?;
    Ok(LrPhases {
        plus: -integral,
        minus: integral,
    })
}

/// `U(t_end, t_start) = Σₙ e^{iαₙ} |φₙ(t_end)⟩⟨φₙ(t_start)|` within one segment.
pub fn lr_evolution(profiles: &GateProfiles, segment: Segment, t_end: f64) -> Result<Mat3> {
    let (start, _) = segment.bounds(profiles.total);
    let phases = lr_phase(profiles, segment, t_end)?;
    let initial = dressed_states_at(&profiles.params_at(start, segment)?).vectors();
    let fin = dressed_states_at(&profiles.params_at(t_end, segment)?).vectors();
    let alphas = [0.0, phases.plus, phases.minus];
    let mut u = Mat3::zeros();
    for n in 0..3 {
        u += fin[n] * initial[n].adjoint() * expi(alphas[n]);
    }
    Ok(u)
}

/// Full two-segment evolution from the closed-form dressed-state expansion.
pub fn lr_gate(profiles: &GateProfiles) -> Result<Mat3> {
    let first = lr_evolution(profiles, Segment::First, 0.5 * profiles.total)?;
    let second = lr_evolution(profiles, Segment::Second, profiles.total)?;
    Ok(second * first)
}
