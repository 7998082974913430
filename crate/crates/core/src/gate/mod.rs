//! Gate targets and pulse compilation.

mod compile;
mod nhqc;
mod schedule;

pub use compile::{
    area_for_amplitude, compile_at_rabi_cap, compile_noncyclic_gate, matched_area_amplitude, minimize_area,
    schedule_invariant_residual, AreaMinimum, CompileOptions, MinimizeOptions, MAX_AMPLITUDE,
};
pub use nhqc::{compile_nhqc_baseline, Envelope};
pub use schedule::{
    pulse_area, scale_to_rabi_cap, PulseSchedule, Sample, ScheduleOrigin, BOUNDARY_COUPLING_TOL,
    DEFAULT_SAMPLES_PER_SEGMENT,
};

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cr, expi, Mat2};

/// Rotation `R[θ, φ]` by angle θ about the axis `cos φ σ_y − sin φ σ_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub theta: f64,
    pub phi: f64,
}

impl GateSpec {
    /// `theta ∈ [0, π]`; `phi` is reduced into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("rotation angle θ must lie in [0, π], got {theta}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("axis phase φ must be finite, got {phi}")));
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    /// `R_X[θ]`, coincident with `R[θ, π/2]`.
    pub fn rx(theta: f64) -> Result<Self> {
        Self::new(theta, 0.5 * PI)
    }

    /// `R_Y[θ]`, coincident with `R[θ, 0]`.
    pub fn ry(theta: f64) -> Result<Self> {
        Self::new(theta, 0.0)
    }
}

/// The 2×2 target over `(|0⟩, |1⟩)`.
pub fn target_unitary(spec: &GateSpec) -> Mat2 {
    let (s, c) = (0.5 * spec.theta).sin_cos();
    Mat2::new(cr(c), -expi(-spec.phi) * s, expi(spec.phi) * s, cr(c))
}
