use crate::error::{Error, Result};
use crate::gate::PulseSchedule;
use crate::invariant::Segment;
use crate::linalg::{max_abs3, Mat3, C64};

use super::RabiErrors;

/// Tolerance on `‖U†U − 1‖` before the propagator is declared unconverged.
const UNITARITY_TOL: f64 = 1e-8;

/// Hamiltonian triples `(H(t), H(t + h/2), H(t + h))` of each RK4 step.
///
/// A step spans two sample intervals, so its midpoint is an exact sample.
pub(crate) struct Step {
    pub t: f64,
    pub h: f64,
    pub hams: [Mat3; 3],
}

pub(crate) fn steps(schedule: &PulseSchedule, errors: RabiErrors) -> impl Iterator<Item = Step> + '_ {
    let h = 2.0 * schedule.dt();
    [Segment::First, Segment::Second].into_iter().flat_map(move |segment| {
        let (start, end) = schedule.segment_range(segment);
        (start..end).step_by(2).map(move |k| {
            let ham = |j: usize| {
                schedule
                    .hamiltonian(j, segment)
                    .with_rabi_errors(errors.eps0, errors.eps1)
                    .matrix()
            };
            Step {
                t: schedule.time(k),
                h,
                hams: [ham(k), ham(k + 1), ham(k + 2)],
            }
        })
    })
}

/// Hamiltonian with static Rabi errors at time `t`.
///
/// Couplings are linearly interpolated between samples (exact on samples); the
/// first segment's phases apply for `t ≤ T/2`.
pub fn error_hamiltonian(schedule: &PulseSchedule, t: f64, errors: RabiErrors) -> Result<Mat3> {
    let total = schedule.total();
    if !(0.0..=total).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, {total}]")));
    }
    let segment = if t <= 0.5 * total { Segment::First } else { Segment::Second };
    let x = t / schedule.dt();
    let k = (x.floor() as usize).min(schedule.len() - 2);
    let frac = x - k as f64;
    let a = schedule.hamiltonian(k, segment);
    let b = schedule.hamiltonian(k + 1, segment);
    let mut h = a;
    h.omega0 = a.omega0 + frac * (b.omega0 - a.omega0);
    h.omega1 = a.omega1 + frac * (b.omega1 - a.omega1);
    Ok(h.with_rabi_errors(errors.eps0, errors.eps1).matrix())
}

/// Time-ordered propagator over `[0, T]` by RK4 on `U̇ = −iHU`.
pub fn propagate_unitary(schedule: &PulseSchedule, errors: RabiErrors) -> Result<Mat3> {
    let mi = C64::new(0.0, -1.0);
    let mut u = Mat3::identity();
    for step in steps(schedule, errors) {
        let [h0, hm, h1] = step.hams.map(|h| h * mi);
        let dt = C64::new(step.h, 0.0);
        let half = C64::new(0.5 * step.h, 0.0);
        let k1 = h0 * u;
        let k2 = hm * (u + k1 * half);
        let k3 = hm * (u + k2 * half);
        let k4 = h1 * (u + k3 * dt);
        u += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (dt / 6.0);
    }
    let defect = max_abs3(&(u.adjoint() * u - Mat3::identity()));
    if !(defect <= UNITARITY_TOL) {
        return Err(Error::Numerical(format!(
            "propagator not unitary (‖U†U − 1‖ = {defect:e}); refine the sampling"
        )));
    }
    Ok(u)
}
