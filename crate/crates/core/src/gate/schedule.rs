use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariant::{GateProfiles, LambdaHamiltonian, Segment};

/// Couplings at `t ∈ {0, T/2, T}` must be below this (rad/ns).
pub const BOUNDARY_COUPLING_TOL: f64 = 1e-9;

/// Default number of samples per half of the schedule.
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 4000;

/// Where a schedule came from; carried into waveform metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleOrigin {
    /// Inverse-engineered two-segment noncyclic gate.
    Noncyclic(GateProfiles),
    /// Conventional single-loop baseline for `R[θ, φ]`.
    Nhqc { theta: f64, phi: f64 },
    /// Read back from a file or built by hand.
    External,
}

/// One row of a sampled schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub omega0: f64,
    pub omega1: f64,
}

/// Uniformly sampled coupling envelopes on `[0, T]`, split into two equal segments.
///
/// There are `2n + 1` samples at `t_k = T·k/(2n)`; sample `n` (`t = T/2`) is shared by
/// both segments, which is why couplings must vanish there. Each segment carries a
/// constant phase for each channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    total: f64,
    samples_per_segment: usize,
    omega0: Vec<f64>,
    omega1: Vec<f64>,
    phase0: [f64; 2],
    phase1: [f64; 2],
    origin: ScheduleOrigin,
}

impl PulseSchedule {
    pub fn new(
        total: f64,
        omega0: Vec<f64>,
        omega1: Vec<f64>,
        phase0: [f64; 2],
        phase1: [f64; 2],
        origin: ScheduleOrigin,
    ) -> Result<Self> {
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidSchedule(format!("duration must be positive, got {total}")));
        }
        if omega0.len() != omega1.len() {
            return Err(Error::InvalidSchedule("channel lengths differ".into()));
        }
        let len = omega0.len();
        if len < 5 || len % 4 != 1 {
            return Err(Error::InvalidSchedule(format!(
                "need 2n+1 samples with n even and n ≥ 2, got {len}"
            )));
        }
        if omega0.iter().chain(omega1.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSchedule("non-finite coupling sample".into()));
        }
        if phase0.iter().chain(phase1.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSchedule("non-finite segment phase".into()));
        }
        let n = (len - 1) / 2;
        for k in [0, n, 2 * n] {
            if omega0[k].abs() > BOUNDARY_COUPLING_TOL || omega1[k].abs() > BOUNDARY_COUPLING_TOL {
                return Err(Error::InvalidSchedule(format!(
                    "couplings must vanish at sample {k} (t = {} ns), got ({:e}, {:e})",
                    total * k as f64 / (2 * n) as f64,
                    omega0[k],
                    omega1[k]
                )));
            }
        }
        Ok(Self {
            total,
            samples_per_segment: n,
            omega0,
            omega1,
            phase0,
            phase1,
            origin,
        })
    }

    /// All-zero schedule, the identity operation.
    pub fn zero(total: f64, samples_per_segment: usize) -> Result<Self> {
        let len = 2 * samples_per_segment + 1;
        Self::new(total, vec![0.0; len], vec![0.0; len], [0.0; 2], [0.0, PI], ScheduleOrigin::External)
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn samples_per_segment(&self) -> usize {
        self.samples_per_segment
    }

    pub fn len(&self) -> usize {
        self.omega0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega0.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.total / (2 * self.samples_per_segment) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.total * (k as f64 / (2 * self.samples_per_segment) as f64)
    }

    pub fn omega0(&self) -> &[f64] {
        &self.omega0
    }

    pub fn omega1(&self) -> &[f64] {
        &self.omega1
    }

    /// Channel-1 phase of a segment.
    pub fn phase(&self, segment: Segment) -> f64 {
        self.phase1[segment.index()]
    }

    /// Channel-0 phase of a segment (zero for inverse-engineered schedules).
    pub fn channel0_phase(&self, segment: Segment) -> f64 {
        self.phase0[segment.index()]
    }

    pub fn origin(&self) -> &ScheduleOrigin {
        &self.origin
    }

    pub fn sample(&self, k: usize) -> Sample {
        Sample {
            t: self.time(k),
            omega0: self.omega0[k],
            omega1: self.omega1[k],
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = Sample> + '_ {
        (0..self.len()).map(move |k| self.sample(k))
    }

    /// Segment owning sample `k`; the shared midpoint belongs to the first.
    pub fn segment_of(&self, k: usize) -> Segment {
        if k <= self.samples_per_segment {
            Segment::First
        } else {
            Segment::Second
        }
    }

    /// Sample index range `[start, end]` (inclusive) of a segment.
    pub fn segment_range(&self, segment: Segment) -> (usize, usize) {
        let n = self.samples_per_segment;
        match segment {
            Segment::First => (0, n),
            Segment::Second => (n, 2 * n),
        }
    }

    /// Hamiltonian at sample `k` with the phases of `segment`.
    pub fn hamiltonian(&self, k: usize, segment: Segment) -> LambdaHamiltonian {
        LambdaHamiltonian::new(self.omega0[k], self.omega1[k], self.phase(segment))
            .with_channel0_phase(self.channel0_phase(segment))
    }

    /// Peak Hamiltonian coupling `max_k max_t |Ω_k(t)|/2` (rad/ns), the quantity a Rabi cap bounds.
    pub fn peak_coupling(&self) -> f64 {
        self.omega0
            .iter()
            .chain(self.omega1.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            * 0.5
    }

    /// Time reparametrization `t → c·t`, `Ω → Ω/c`.
    pub fn stretched(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain(format!("stretch factor must be positive, got {factor}")));
        }
        let origin = match self.origin {
            ScheduleOrigin::Noncyclic(p) => ScheduleOrigin::Noncyclic(p.with_total(p.total * factor)),
            other => other,
        };
        Self::new(
            self.total * factor,
            self.omega0.iter().map(|v| v / factor).collect(),
            self.omega1.iter().map(|v| v / factor).collect(),
            self.phase0,
            self.phase1,
            origin,
        )
    }
}

/// Composite Simpson rule on a uniform grid with an even number of intervals.
pub(crate) fn simpson(values: &[f64], h: f64) -> f64 {
    debug_assert!(values.len() % 2 == 1 && values.len() >= 3);
    let last = values.len() - 1;
    let mut sum = values[0] + values[last];
    for (k, v) in values.iter().enumerate().take(last).skip(1) {
        sum += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * h / 3.0
}

/// Pulse area `S = ½∫√(Ω₀² + Ω₁²) dt`, Simpson per segment.
pub fn pulse_area(schedule: &PulseSchedule) -> f64 {
    let magnitude: Vec<f64> = schedule
        .omega0
        .iter()
        .zip(schedule.omega1.iter())
        .map(|(a, b)| a.hypot(*b))
        .collect();
    let h = schedule.dt();
    let n = schedule.samples_per_segment;
    0.5 * (simpson(&magnitude[..=n], h) + simpson(&magnitude[n..], h))
}

/// Stretches a schedule so its peak coupling `max|Ω_k|/2` equals `omega_max`.
///
/// The pulse area is invariant under the stretch; the new duration is `schedule.total()`
/// of the result.
pub fn scale_to_rabi_cap(schedule: &PulseSchedule, omega_max: f64) -> Result<PulseSchedule> {
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(Error::Domain(format!("Rabi cap must be positive, got {omega_max}")));
    }
    let peak = schedule.peak_coupling();
    if peak == 0.0 {
        return Err(Error::InvalidSchedule("cannot scale an all-zero schedule to a Rabi cap".into()));
    }
    let factor = peak / omega_max;
    if factor == 1.0 {
        return Ok(schedule.clone());
    }
    schedule.stretched(factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(n: usize, total: f64, peak: f64) -> PulseSchedule {
        let len = 2 * n + 1;
        let w = |k: usize| {
            let x = (k % n) as f64 / n as f64;
            peak * (std::f64::consts::PI * x).sin().powi(2)
        };
        let o0: Vec<f64> = (0..len).map(|k| if k == n || k == 2 * n { 0.0 } else { w(k) }).collect();
        let o1: Vec<f64> = o0.iter().map(|v| 0.5 * v).collect();
        PulseSchedule::new(total, o0, o1, [0.0; 2], [0.0, PI], ScheduleOrigin::External).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PulseSchedule::new(1.0, vec![0.0; 7], vec![0.0; 7], [0.0; 2], [0.0; 2], ScheduleOrigin::External).is_err());
        assert!(PulseSchedule::new(1.0, vec![0.0; 9], vec![0.0; 8], [0.0; 2], [0.0; 2], ScheduleOrigin::External).is_err());
        assert!(PulseSchedule::new(-1.0, vec![0.0; 9], vec![0.0; 9], [0.0; 2], [0.0; 2], ScheduleOrigin::External).is_err());
        let mut o = vec![0.0; 9];
        o[4] = 0.1;
        assert!(PulseSchedule::new(1.0, o, vec![0.0; 9], [0.0; 2], [0.0; 2], ScheduleOrigin::External).is_err());
    }

    #[test]
    fn sample_times_hit_boundaries_exactly() {
        let s = PulseSchedule::zero(29.5, 4000).unwrap();
        assert_eq!(s.time(4000), 14.75);
        assert_eq!(s.time(8000), 29.5);
        assert_eq!(s.segment_of(4000), Segment::First);
        assert_eq!(s.segment_of(4001), Segment::Second);
    }

    #[test]
    fn zero_schedule_has_zero_area() {
        assert_eq!(pulse_area(&PulseSchedule::zero(10.0, 8).unwrap()), 0.0);
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let h = 0.25;
        let v: Vec<f64> = (0..=8).map(|k| (k as f64 * h).powi(3)).collect();
        assert!((simpson(&v, h) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cap_scaling_doubles_duration() {
        let two_pi = 2.0 * PI;
        // peak Hamiltonian coupling |Ω₀|/2 = 2π·0.04
        let s = bump(200, 10.0, 2.0 * two_pi * 0.04);
        assert!((s.peak_coupling() - two_pi * 0.04).abs() < 1e-12);
        let scaled = scale_to_rabi_cap(&s, two_pi * 0.02).unwrap();
        assert!((scaled.total() - 20.0).abs() < 1e-12);
        assert!((pulse_area(&scaled) - pulse_area(&s)).abs() < 1e-10);
        assert!((scaled.peak_coupling() - two_pi * 0.02).abs() < 1e-12);
    }

    #[test]
    fn cap_scaling_at_cap_is_identity() {
        let s = bump(100, 10.0, 0.3);
        let same = scale_to_rabi_cap(&s, s.peak_coupling()).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn cap_scaling_rejects_zero_schedule() {
        assert!(scale_to_rabi_cap(&PulseSchedule::zero(5.0, 4).unwrap(), 0.1).is_err());
    }
}
