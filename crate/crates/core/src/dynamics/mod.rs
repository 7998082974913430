//! Closed and open dynamics of a compiled schedule, with fidelity measures.
//!
//! The open dynamics follow
//!
//! ```text
//! ρ̇ = i[ρ, H] + ½ Σ_k Γ_k (2 A_k ρ A_k† − A_k†A_k ρ − ρ A_k†A_k)
//! ```
//!
//! with `A₁ = σ₁ = |0⟩⟨e| + |1⟩⟨e|` (decay out of `|e⟩`) and
//! `A₂ = σ₂ = diag(−1, 2, −1)` (one collective dephasing operator).

mod fidelity;
mod lindblad;
mod propagate;

pub use fidelity::{
    avg_gate_fidelity, avg_gate_fidelity_direct, avg_gate_fidelity_from_map, bloch_avg_gate_fidelity,
    real_superposition_input, state_fidelity, DEFAULT_FIDELITY_STATES,
};
pub use lindblad::{lindblad_evolve, lindblad_superoperator, LindbladOutcome, StateSnapshot, Superoperator};
pub use propagate::{error_hamiltonian, propagate_unitary};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cr, hermitian_eigenvalues, max_abs3, Mat3, Vec3};

/// Tolerances a valid density matrix must meet.
pub const DENSITY_TOL: f64 = 1e-10;

/// Decay and dephasing rate used for the reference results, `2π × 5 kHz` in rad/ns.
pub const REFERENCE_DECOHERENCE_RATE: f64 = TAU * 5e-6;

/// Reference Rabi cap, `2π × 20 MHz` in rad/ns.
pub const REFERENCE_RABI_CAP: f64 = TAU * 0.02;

/// Static fractional amplitude errors on the two couplings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RabiErrors {
    pub eps0: f64,
    pub eps1: f64,
}

impl RabiErrors {
    pub fn new(eps0: f64, eps1: f64) -> Result<Self> {
        for e in [eps0, eps1] {
            if !(-1.0..=1.0).contains(&e) {
                return Err(Error::Domain(format!("Rabi error fraction must lie in [−1, 1], got {e}")));
            }
        }
        Ok(Self { eps0, eps1 })
    }
}

/// Decoherence rates (rad/ns) and static Rabi errors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub gamma1: f64,
    pub gamma2: f64,
    pub eps0: f64,
    pub eps1: f64,
}

impl NoiseModel {
    pub fn new(gamma1: f64, gamma2: f64, eps0: f64, eps1: f64) -> Result<Self> {
        if !(gamma1 >= 0.0 && gamma1.is_finite() && gamma2 >= 0.0 && gamma2.is_finite()) {
            return Err(Error::Domain(format!("rates must be nonnegative, got Γ₁={gamma1}, Γ₂={gamma2}")));
        }
        RabiErrors::new(eps0, eps1)?;
        Ok(Self {
            gamma1,
            gamma2,
            eps0,
            eps1,
        })
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    /// `Γ₁ = Γ₂ = 2π × 5 kHz`, no Rabi error.
    pub fn reference() -> Self {
        Self {
            gamma1: REFERENCE_DECOHERENCE_RATE,
            gamma2: REFERENCE_DECOHERENCE_RATE,
            ..Self::default()
        }
    }

    pub fn with_errors(self, eps0: f64, eps1: f64) -> Result<Self> {
        Self::new(self.gamma1, self.gamma2, eps0, eps1)
    }

    pub fn errors(&self) -> RabiErrors {
        RabiErrors {
            eps0: self.eps0,
            eps1: self.eps1,
        }
    }
}

/// The two jump operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseOperators {
    pub sigma1: Mat3,
    pub sigma2: Mat3,
}

impl CollapseOperators {
    pub fn new() -> Self {
        let mut sigma1 = Mat3::zeros();
        sigma1[(0, 1)] = cr(1.0);
        sigma1[(2, 1)] = cr(1.0);
        let sigma2 = Mat3::from_diagonal(&Vec3::new(cr(-1.0), cr(2.0), cr(-1.0)));
        Self { sigma1, sigma2 }
    }
}

impl Default for CollapseOperators {
    fn default() -> Self {
        Self::new()
    }
}

/// Hermitian, unit-trace, positive semidefinite 3×3 state over `(|0⟩, |e⟩, |1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(Mat3);

impl DensityMatrix3 {
    pub fn new(m: Mat3) -> Result<Self> {
        let herm = max_abs3(&(m - m.adjoint()));
        if herm > DENSITY_TOL {
            return Err(Error::Domain(format!("density matrix not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace();
        if (tr - cr(1.0)).norm() > DENSITY_TOL {
            return Err(Error::Domain(format!("density matrix trace {tr} ≠ 1")));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -DENSITY_TOL {
            return Err(Error::Domain(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|` after normalising ψ.
    pub fn pure(psi: &Vec3) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot build a pure state from a zero vector".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self(v * v.adjoint()))
    }

    /// Basis projector `|k⟩⟨k|`, `k` in `(|0⟩, |e⟩, |1⟩)` order.
    pub fn basis(k: usize) -> Self {
        let mut m = Mat3::zeros();
        m[(k, k)] = cr(1.0);
        Self(m)
    }

    /// Bypasses validation; for states produced by the integrators.
    pub(crate) fn from_raw(m: Mat3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Populations `(P₀, P_e, P₁)`.
    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, Mat3};

    #[test]
    fn collapse_operator_structure() {
        let ops = CollapseOperators::new();
        // annihilates the qubit subspace
        for k in [0, 2] {
            let mut v = Vec3::zeros();
            v[k] = cr(1.0);
            assert_eq!((ops.sigma1 * v).norm(), 0.0);
        }
        assert_eq!(ops.sigma2[(0, 0)], cr(-1.0));
        assert_eq!(ops.sigma2[(1, 1)], cr(2.0));
        assert_eq!(ops.sigma2[(2, 2)], cr(-1.0));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix3::new(Mat3::identity() * cr(1.0 / 3.0)).is_ok());
        assert!(DensityMatrix3::new(Mat3::identity()).is_err());
        let mut m = Mat3::zeros();
        m[(0, 0)] = cr(1.5);
        m[(2, 2)] = cr(-0.5);
        assert!(DensityMatrix3::new(m).is_err());
        let mut m = DensityMatrix3::basis(0).matrix().to_owned();
        m[(0, 1)] = c(0.0, 0.1);
        assert!(DensityMatrix3::new(m).is_err());
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 0.0, 1.5, 0.0).is_err());
        assert!(NoiseModel::new(0.1, 0.1, -1.0, 1.0).is_ok());
    }
}
