//! Two-segment angle profiles for the noncyclic gate.
//!
//! On each half of `[0, T]` the mixing angle γ is a quartic bump that vanishes at
//! both ends of the half (nonpositive on the first, nonnegative on the second),
//! and β is a degree-7 smoothstep between `θ/4` and `0` whose rate vanishes to
//! third order at both ends. The second half mirrors the first under `t → T − t`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::InvariantParams;
use crate::error::{Error, Result};

/// Relative slack allowed on segment boundaries when classifying times.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Segment {
    First,
    Second,
}

impl Segment {
    pub fn index(self) -> usize {
        match self {
            Segment::First => 0,
            Segment::Second => 1,
        }
    }

    /// `[start, end]` of this segment for total duration `total`.
    pub fn bounds(self, total: f64) -> (f64, f64) {
        match self {
            Segment::First => (0.0, 0.5 * total),
            Segment::Second => (0.5 * total, total),
        }
    }
}

/// An angle together with its analytic time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleValue {
    pub value: f64,
    pub rate: f64,
}

fn checked_time(t: f64, total: f64, segment: Segment) -> Result<f64> {
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Domain(format!("total duration must be positive, got {total}")));
    }
    let (lo, hi) = segment.bounds(total);
    let slack = BOUNDARY_SLACK * total;
    if !(t >= lo - slack && t <= hi + slack) {
        return Err(Error::Domain(format!(
            "t = {t} ns outside {segment:?} segment [{lo}, {hi}]"
        )));
    }
    Ok(t.clamp(lo, hi))
}

/// γ(t) and γ̇(t) for amplitude `amplitude` (= |γ| at the segment midpoint).
pub fn gamma_profile(t: f64, amplitude: f64, total: f64, segment: Segment) -> Result<AngleValue> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::Domain(format!("amplitude A must be positive, got {amplitude}")));
    }
    let t = checked_time(t, total, segment)?;
    let half = 0.5 * total;
    let scale = amplitude / (0.25 * total).powi(4);
    let (a, b, sign) = match segment {
        Segment::First => (t, t - half, -1.0),
        Segment::Second => (t - half, t - total, 1.0),
    };
    Ok(AngleValue {
        value: sign * scale * a * a * b * b,
        rate: sign * scale * 2.0 * a * b * (a + b),
    })
}

/// β(t) and β̇(t) for rotation angle `theta`.
pub fn beta_profile(t: f64, theta: f64, total: f64, segment: Segment) -> Result<AngleValue> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("rotation angle θ must lie in [0, π], got {theta}")));
    }
    let t = checked_time(t, total, segment)?;
    let half = 0.5 * total;
    let (x, dx_dt) = match segment {
        Segment::First => ((half - t) / half, -1.0 / half),
        Segment::Second => ((t - half) / half, 1.0 / half),
    };
    let x3 = x * x * x;
    let value = 35.0 * theta * x3 * x * (0.25 - 0.6 * x + 0.5 * x * x - x3 / 7.0);
    let one_minus = 1.0 - x;
    let rate = 35.0 * theta * x3 * one_minus * one_minus * one_minus * dx_dt;
    Ok(AngleValue { value, rate })
}

/// The full parameter trajectory of one noncyclic gate: target angle θ, axis phase φ,
/// amplitude A and duration T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateProfiles {
    pub theta: f64,
    pub phi: f64,
    pub amplitude: f64,
    pub total: f64,
}

impl GateProfiles {
    pub fn new(theta: f64, phi: f64, amplitude: f64, total: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("rotation angle θ must lie in [0, π], got {theta}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::Domain(format!("amplitude A must be positive, got {amplitude}")));
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Domain(format!("duration T must be positive, got {total}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("phase φ must be finite, got {phi}")));
        }
        Ok(Self {
            theta,
            phi,
            amplitude,
            total,
        })
    }

    /// Channel-1 drive phase on a segment; the second half is shifted by π.
    pub fn segment_phase(&self, segment: Segment) -> f64 {
        match segment {
            Segment::First => self.phi,
            Segment::Second => self.phi + PI,
        }
    }

    pub fn params_at(&self, t: f64, segment: Segment) -> Result<InvariantParams> {
        let g = gamma_profile(t, self.amplitude, self.total, segment)?;
        let b = beta_profile(t, self.theta, self.total, segment)?;
        Ok(InvariantParams::new(g.value, b.value, g.rate, b.rate, self.segment_phase(segment)))
    }

    /// Same trajectory stretched to a new duration.
    pub fn with_total(&self, total: f64) -> Self {
        Self { total, ..*self }
    }
}
