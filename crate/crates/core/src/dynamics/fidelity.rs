use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::gate::{target_unitary, GateSpec, PulseSchedule};
use crate::linalg::{c, cr, embed_qubit, Mat2, Mat3, Vec2};

use super::{lindblad_evolve, lindblad_superoperator, DensityMatrix3, NoiseModel, Superoperator};

/// Input-state count for the real-superposition gate fidelity.
pub const DEFAULT_FIDELITY_STATES: usize = 1001;

/// `⟨ψ|ρ|ψ⟩` for a qubit state embedded with zero `|e⟩` amplitude.
pub fn state_fidelity(rho: &DensityMatrix3, psi: &Vec2) -> Result<f64> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("target state must be normalised, got norm {norm}")));
    }
    Ok(overlap(rho.matrix(), psi))
}

fn overlap(rho: &Mat3, psi: &Vec2) -> f64 {
    let v = embed_qubit(psi);
    v.dotc(&(rho * v)).re
}

/// `cos θ′|0⟩ + sin θ′|1⟩`
pub fn real_superposition_input(angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(cr(c), cr(s))
}

fn input_angles(n_states: usize) -> Result<impl Iterator<Item = (f64, f64)>> {
    if n_states < 2 {
        return Err(Error::Domain(format!("need at least 2 input states, got {n_states}")));
    }
    let last = n_states - 1;
    Ok((0..n_states).map(move |j| {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        (TAU * j as f64 / last as f64, w / last as f64)
    }))
}

/// `(1/2π)∫₀^{2π} ⟨ψ_f|𝓔(|ψ⟩⟨ψ|)|ψ_f⟩ dθ′` over real superpositions, trapezoid rule on
/// `n_states` equally spaced angles.
pub fn avg_gate_fidelity_from_map(map: &Superoperator, target: &Mat2, n_states: usize) -> Result<f64> {
    let mut total = 0.0;
    for (angle, weight) in input_angles(n_states)? {
        let psi = real_superposition_input(angle);
        let rho = embed_qubit(&psi) * embed_qubit(&psi).adjoint();
        total += weight * overlap(&map.apply(&rho), &(target * psi));
    }
    Ok(total)
}

/// Gate fidelity via one superoperator propagation.
pub fn avg_gate_fidelity(spec: &GateSpec, schedule: &PulseSchedule, noise: &NoiseModel, n_states: usize) -> Result<f64> {
    let map = lindblad_superoperator(schedule, noise)?;
    avg_gate_fidelity_from_map(&map, &target_unitary(spec), n_states)
}

/// Same average with every input state propagated separately.
pub fn avg_gate_fidelity_direct(
    spec: &GateSpec,
    schedule: &PulseSchedule,
    noise: &NoiseModel,
    n_states: usize,
) -> Result<f64> {
    let target = target_unitary(spec);
    let mut total = 0.0;
    for (angle, weight) in input_angles(n_states)? {
        let psi = real_superposition_input(angle);
        let rho0 = DensityMatrix3::pure(&embed_qubit(&psi))?;
        let out = lindblad_evolve(schedule, &rho0, noise, false)?;
        total += weight * overlap(out.final_state.matrix(), &(target * psi));
    }
    Ok(total)
}

/// Average over the whole Bloch sphere, exact through the six Pauli-axis states.
///
/// Not the real-superposition average used for the reference numbers.
pub fn bloch_avg_gate_fidelity(map: &Superoperator, target: &Mat2) -> f64 {
    let r = FRAC_1_SQRT_2;
    let states = [
        Vec2::new(cr(1.0), cr(0.0)),
        Vec2::new(cr(0.0), cr(1.0)),
        Vec2::new(cr(r), cr(r)),
        Vec2::new(cr(r), cr(-r)),
        Vec2::new(cr(r), c(0.0, r)),
        Vec2::new(cr(r), c(0.0, -r)),
    ];
    states
        .iter()
        .map(|psi| {
            let rho = embed_qubit(psi) * embed_qubit(psi).adjoint();
            overlap(&map.apply(&rho), &(target * psi))
        })
        .sum::<f64>()
        / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{compile_noncyclic_gate, CompileOptions};
    use crate::linalg::Vec3;

    #[test]
    fn state_fidelity_examples() {
        let psi = Vec2::new(cr(0.6), c(0.0, 0.8));
        let rho = DensityMatrix3::pure(&embed_qubit(&psi)).unwrap();
        assert!((state_fidelity(&rho, &psi).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(state_fidelity(&DensityMatrix3::basis(1), &psi).unwrap(), 0.0);
        let mut mixed = Mat3::zeros();
        mixed[(0, 0)] = cr(0.5);
        mixed[(2, 2)] = cr(0.5);
        let mixed = DensityMatrix3::new(mixed).unwrap();
        assert!((state_fidelity(&mixed, &psi).unwrap() - 0.5).abs() < 1e-15);
        assert!(state_fidelity(&mixed, &Vec2::new(cr(1.0), cr(1.0))).is_err());
    }

    #[test]
    fn noiseless_gate_is_perfect() {
        let spec = GateSpec::new(0.9, 2.0).unwrap();
        let s = compile_noncyclic_gate(&spec, 0.5, 29.5, CompileOptions { samples_per_segment: 1000 }).unwrap();
        let f = avg_gate_fidelity(&spec, &s, &NoiseModel::noiseless(), 201).unwrap();
        assert!((f - 1.0).abs() < 1e-8);
        let map = lindblad_superoperator(&s, &NoiseModel::noiseless()).unwrap();
        assert!((bloch_avg_gate_fidelity(&map, &target_unitary(&spec)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn identity_map_on_wrong_target() {
        // Identity channel vs target X: ⟨ψ|X|ψ⟩² averaged over real states = ½ ∫ sin²2θ′ = ½
        let id = lindblad_superoperator(&PulseSchedule::zero(1.0, 2).unwrap(), &NoiseModel::noiseless()).unwrap();
        let x = Mat2::new(cr(0.0), cr(1.0), cr(1.0), cr(0.0));
        let f = avg_gate_fidelity_from_map(&id, &x, 1001).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
        // Bloch average of |⟨ψ|X|ψ⟩|² is 1/3
        assert!((bloch_avg_gate_fidelity(&id, &x) - 1.0 / 3.0).abs() < 1e-12);
        let _ = Vec3::zeros();
    }

    #[test]
    fn needs_two_states() {
        let id = lindblad_superoperator(&PulseSchedule::zero(1.0, 2).unwrap(), &NoiseModel::noiseless()).unwrap();
        assert!(avg_gate_fidelity_from_map(&id, &Mat2::identity(), 1).is_err());
    }
}
