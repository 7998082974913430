//! Resonant Λ-system Hamiltonian, its Lewis–Riesenfeld invariant and the
//! inverse-engineering map from invariant angles to coupling strengths.
//!
//! Units: ħ = 1, time in ns, couplings in rad/ns. All matrices use the level
//! ordering `(|0⟩, |e⟩, |1⟩)`.

mod phase;
mod profiles;

pub use phase::{lr_evolution, lr_gate, lr_phase, segment_phase_integral, LrPhases};
pub use profiles::{beta_profile, gamma_profile, AngleValue, GateProfiles, Segment};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cr, expi, max_abs3, Mat3, Vec3, C64, I};

/// Eigenvalue scale of the invariant. No dynamical quantity depends on it.
pub const DEFAULT_LAMBDA: f64 = 1.0;

/// Below this |γ| the coupling formula uses the series `cot γ ≈ 1/γ − γ/3`.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Two resonant couplings `|0⟩ ↔ |e⟩` and `|e⟩ ↔ |1⟩` in the rotating frame.
///
/// `phi` is the relative phase on the `|1⟩` channel. `phi0` is an optional phase on
/// the `|0⟩` channel; inverse-engineered schedules keep it at zero, the NHQC baseline
/// uses it for the second-half phase jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaHamiltonian {
    pub omega0: f64,
    pub omega1: f64,
    pub phi: f64,
    #[serde(default)]
    pub phi0: f64,
}

impl LambdaHamiltonian {
    pub fn new(omega0: f64, omega1: f64, phi: f64) -> Self {
        Self {
            omega0,
            omega1,
            phi,
            phi0: 0.0,
        }
    }

    pub fn with_channel0_phase(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    /// Applies static multiplicative amplitude errors `(1+ε₀)`, `(1+ε₁)`.
    pub fn with_rabi_errors(mut self, eps0: f64, eps1: f64) -> Self {
        self.omega0 *= 1.0 + eps0;
        self.omega1 *= 1.0 + eps1;
        self
    }

    pub fn matrix(&self) -> Mat3 {
        let mut h = Mat3::zeros();
        let g0 = expi(-self.phi0) * (0.5 * self.omega0);
        let g1 = expi(-self.phi) * (0.5 * self.omega1);
        h[(1, 0)] = g0;
        h[(0, 1)] = g0.conj();
        h[(1, 2)] = g1;
        h[(2, 1)] = g1.conj();
        h
    }
}

/// Instantaneous parametrization of the invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantParams {
    pub gamma: f64,
    pub beta: f64,
    pub gamma_dot: f64,
    pub beta_dot: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl InvariantParams {
    pub fn new(gamma: f64, beta: f64, gamma_dot: f64, beta_dot: f64, phi: f64) -> Self {
        Self {
            gamma,
            beta,
            gamma_dot,
            beta_dot,
            phi,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

/// Orthonormal eigenbasis of the invariant with eigenvalues `0, +λ/2, −λ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    pub phi0: Vec3,
    pub phi_plus: Vec3,
    pub phi_minus: Vec3,
    pub eigenvalues: [f64; 3],
}

impl DressedFrame {
    pub fn vectors(&self) -> [Vec3; 3] {
        [self.phi0, self.phi_plus, self.phi_minus]
    }

    /// Gram matrix `⟨φ_m|φ_n⟩` in the order `(0, +, −)`.
    pub fn gram(&self) -> Mat3 {
        let v = self.vectors();
        Mat3::from_fn(|m, n| v[m].dotc(&v[n]))
    }
}

/// Invariant matrix `I(t)`.
pub fn invariant_at(p: &InvariantParams) -> Mat3 {
    let (sg, cg) = p.gamma.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let half = 0.5 * p.lambda;
    let e = expi(p.phi);
    let mut m = Mat3::zeros();
    m[(0, 1)] = cr(cg * sb);
    m[(1, 0)] = cr(cg * sb);
    m[(0, 2)] = -I * sg * e.conj();
    m[(2, 0)] = I * sg * e;
    m[(1, 2)] = e.conj() * (cg * cb);
    m[(2, 1)] = e * (cg * cb);
    m * cr(half)
}

/// `∂I/∂t = γ̇ ∂I/∂γ + β̇ ∂I/∂β` at fixed φ.
fn invariant_time_derivative(p: &InvariantParams) -> Mat3 {
    let (sg, cg) = p.gamma.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let e = expi(p.phi);
    let (gd, bd) = (p.gamma_dot, p.beta_dot);
    let d01 = -sg * sb * gd + cg * cb * bd;
    let d12 = -sg * cb * gd - cg * sb * bd;
    let mut m = Mat3::zeros();
    m[(0, 1)] = cr(d01);
    m[(1, 0)] = cr(d01);
    m[(0, 2)] = -I * e.conj() * (cg * gd);
    m[(2, 0)] = I * e * (cg * gd);
    m[(1, 2)] = e.conj() * d12;
    m[(2, 1)] = e * d12;
    m * cr(0.5 * p.lambda)
}

/// Dressed states exactly as parametrized by (γ, β, φ).
pub fn dressed_states_at(p: &InvariantParams) -> DressedFrame {
    let (sg, cg) = p.gamma.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let e = expi(p.phi);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phi0 = Vec3::new(cr(cg * cb), -I * sg, -e * (cg * sb));
    let dressed = |s: f64| {
        Vec3::new(
            C64::new(sg * cb, s * sb) * r,
            I * (cg * r),
            C64::new(-sg * sb, s * cb) * e * r,
        )
    };
    DressedFrame {
        phi0,
        phi_plus: dressed(1.0),
        phi_minus: dressed(-1.0),
        eigenvalues: [0.0, 0.5 * p.lambda, -0.5 * p.lambda],
    }
}

/// Couplings `(Ω₀, Ω₁)` that keep the invariant constant along (γ, β).
///
/// At `γ = 0` the `β̇ cot γ` term is replaced by its limit, which is finite only
/// when `β̇` vanishes there as well.
pub fn couplings_from_invariant(p: &InvariantParams) -> Result<(f64, f64)> {
    let InvariantParams {
        gamma,
        beta,
        gamma_dot,
        beta_dot,
        ..
    } = *p;
    if !(gamma.is_finite() && beta.is_finite() && gamma_dot.is_finite() && beta_dot.is_finite()) {
        return Err(Error::Domain(format!("non-finite invariant parameters {p:?}")));
    }
    let cot_term = if gamma == 0.0 {
        if beta_dot != 0.0 {
            return Err(Error::Singularity { gamma, beta_dot });
        }
        0.0
    } else if gamma.abs() < SERIES_THRESHOLD {
        beta_dot * (1.0 / gamma - gamma / 3.0)
    } else {
        let s = gamma.sin();
        if s == 0.0 {
            return Err(Error::Singularity { gamma, beta_dot });
        }
        beta_dot * gamma.cos() / s
    };
    let (sb, cb) = beta.sin_cos();
    let omega0 = 2.0 * (cot_term * sb + gamma_dot * cb);
    let omega1 = 2.0 * (cot_term * cb - gamma_dot * sb);
    Ok((omega0, omega1))
}

/// Inverse of [`couplings_from_invariant`] for the rates: recovers `(γ̇, β̇)` from
/// `(Ω₀, Ω₁)` given `(γ, β)` with `sin γ ≠ 0`.
pub fn rates_from_couplings(gamma: f64, beta: f64, omega0: f64, omega1: f64) -> Result<(f64, f64)> {
    let s = gamma.sin();
    if s == 0.0 {
        return Err(Error::Singularity { gamma, beta_dot: f64::NAN });
    }
    let (sb, cb) = beta.sin_cos();
    // Rotating (Ω₀, Ω₁)/2 by β separates the two terms.
    let gamma_dot = 0.5 * (omega0 * cb - omega1 * sb);
    let cot_bd = 0.5 * (omega0 * sb + omega1 * cb);
    Ok((gamma_dot, cot_bd * s / gamma.cos()))
}

/// Max-abs norm of `∂I/∂t + (1/i)[I, H]`; zero when `h` is the inverse-engineered Hamiltonian.
pub fn invariant_residual(p: &InvariantParams, h: &LambdaHamiltonian) -> f64 {
    let inv = invariant_at(p);
    let hm = h.matrix();
    let comm = inv * hm - hm * inv;
    let lhs = invariant_time_derivative(p) - comm * I;
    max_abs3(&lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, max_abs3};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn params(gamma: f64, beta: f64, phi: f64) -> InvariantParams {
        InvariantParams::new(gamma, beta, 0.0, 0.0, phi)
    }

    #[test]
    fn hamiltonian_matrix_elements() {
        let h = LambdaHamiltonian::new(0.3, 0.5, 0.7).matrix();
        assert_eq!(h[(0, 1)], cr(0.15));
        assert!((h[(1, 2)] - expi(-0.7) * 0.25).norm() < 1e-16);
        assert!(max_abs3(&(h - h.adjoint())) == 0.0);
        for i in 0..3 {
            assert_eq!(h[(i, i)], cr(0.0));
        }
        assert_eq!(h[(0, 2)], cr(0.0));
    }

    #[test]
    fn invariant_examples() {
        let m = invariant_at(&params(0.0, FRAC_PI_2, 0.0));
        assert!((m[(0, 1)] - cr(0.5)).norm() < 1e-16);
        assert!(m[(1, 2)].norm() < 1e-16);
        assert!(m[(0, 2)].norm() < 1e-16);

        let m = invariant_at(&params(FRAC_PI_2, 0.4, 0.0));
        assert!((m[(0, 2)] - C64::new(0.0, -0.5)).norm() < 1e-16);
        assert!((m[(2, 0)] - C64::new(0.0, 0.5)).norm() < 1e-16);
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert!(m[(i, j)].norm() < 1e-16);
        }
    }

    #[test]
    fn dressed_examples_at_origin() {
        let f = dressed_states_at(&params(0.0, 0.0, 0.0));
        assert!((f.phi0 - Vec3::new(cr(1.0), cr(0.0), cr(0.0))).norm() < 1e-16);
        let expect = Vec3::new(cr(0.0), I * FRAC_1_SQRT_2, I * FRAC_1_SQRT_2);
        assert!((f.phi_plus - expect).norm() < 1e-16);
    }

    #[test]
    fn coupling_examples() {
        let (o0, o1) = couplings_from_invariant(&InvariantParams::new(FRAC_PI_4, 0.0, 0.3, 0.0, 0.0)).unwrap();
        assert!((o0 - 0.6).abs() < 1e-15 && o1.abs() < 1e-15);
        let (o0, o1) = couplings_from_invariant(&InvariantParams::new(FRAC_PI_4, FRAC_PI_2, 0.0, 0.2, 0.0)).unwrap();
        assert!((o0 - 0.4).abs() < 1e-15 && o1.abs() < 1e-15);
    }

    #[test]
    fn coupling_singularity() {
        let err = couplings_from_invariant(&InvariantParams::new(0.0, 0.1, 0.0, 0.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }));
        let (o0, o1) = couplings_from_invariant(&InvariantParams::new(0.0, 0.1, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!((o0, o1), (0.0, 0.0));
    }

    #[test]
    fn series_branch_matches_closed_form() {
        let (gd, bd, beta) = (1e-3, 2e-9, 0.3);
        for g in [0.9999999e-6, 3e-7, -5e-7, 1e-9] {
            let (o0, o1) = couplings_from_invariant(&InvariantParams::new(g, beta, gd, bd, 0.0)).unwrap();
            let cot = bd * g.cos() / g.sin();
            let e0 = 2.0 * (cot * beta.sin() + gd * beta.cos());
            let e1 = 2.0 * (cot * beta.cos() - gd * beta.sin());
            assert!((o0 - e0).abs() < 1e-13 * e0.abs());
            assert!((o1 - e1).abs() < 1e-13 * e1.abs());
        }
    }

    proptest! {
        #[test]
        fn dressed_frame_orthonormal_eigenbasis(gamma in -3.0f64..3.0, beta in -3.0f64..3.0, phi in 0.0f64..6.3) {
            let p = params(gamma, beta, phi);
            let f = dressed_states_at(&p);
            prop_assert!(max_abs3(&(f.gram() - Mat3::identity())) < 1e-12);
            let inv = invariant_at(&p);
            for (v, &ev) in f.vectors().iter().zip(f.eigenvalues.iter()) {
                prop_assert!((inv * v - v * cr(ev)).norm() < 1e-12);
            }
            let eig = hermitian_eigenvalues(&inv);
            prop_assert!((eig[0] + 0.5).abs() < 1e-12 && eig[1].abs() < 1e-12 && (eig[2] - 0.5).abs() < 1e-12);
            prop_assert!(max_abs3(&(inv - inv.adjoint())) < 1e-15);
        }

        #[test]
        fn couplings_round_trip(gamma in 0.05f64..1.5, sign in prop::bool::ANY, beta in -3.0f64..3.0,
                                gd in -1.0f64..1.0, bd in -1.0f64..1.0) {
            let gamma = if sign { gamma } else { -gamma };
            let p = InvariantParams::new(gamma, beta, gd, bd, 0.2);
            let (o0, o1) = couplings_from_invariant(&p).unwrap();
            let (gd2, bd2) = rates_from_couplings(gamma, beta, o0, o1).unwrap();
            prop_assert!((gd - gd2).abs() < 1e-10);
            prop_assert!((bd - bd2).abs() < 1e-10);
            let h = LambdaHamiltonian::new(o0, o1, p.phi);
            prop_assert!(invariant_residual(&p, &h) < 1e-12);
        }
    }

    #[test]
    fn perturbed_coupling_breaks_invariance() {
        let p = InvariantParams::new(0.4, 0.3, 0.05, -0.02, 0.0);
        let (o0, o1) = couplings_from_invariant(&p).unwrap();
        let good = LambdaHamiltonian::new(o0, o1, 0.0);
        let bad = LambdaHamiltonian::new(1.1 * o0, o1, 0.0);
        assert!(invariant_residual(&p, &good) < 1e-15);
        assert!(invariant_residual(&p, &bad) > 1e-4);
    }
}
