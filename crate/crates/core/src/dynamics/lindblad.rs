use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::gate::PulseSchedule;
use crate::invariant::{LambdaHamiltonian, Segment};
use crate::linalg::{cr, hermitian_basis, hermitian_coordinates, hermitian_eigenvalues, hermitian_part, Mat3, I};

use super::propagate::steps;
use super::{CollapseOperators, DensityMatrix3, NoiseModel};

/// Eigenvalues below this abort the direct evolution.
const POSITIVITY_TOL: f64 = -1e-6;
/// Steps between positivity checks on the direct path.
const POSITIVITY_STRIDE: usize = 50;

/// Precomputed dissipator pieces for one noise model.
struct Dissipator {
    channels: Vec<(f64, Mat3, Mat3, Mat3)>,
}

impl Dissipator {
    fn new(noise: &NoiseModel) -> Self {
        let ops = CollapseOperators::new();
        let channels = [(noise.gamma1, ops.sigma1), (noise.gamma2, ops.sigma2)]
            .into_iter()
            .filter(|(rate, _)| *rate > 0.0)
            .map(|(rate, a)| (rate, a, a.adjoint(), a.adjoint() * a))
            .collect();
        Self { channels }
    }

    /// `i[ρ, H] + ½ Σ Γ (2AρA† − A†Aρ − ρA†A)`
    fn rhs(&self, rho: &Mat3, h: &Mat3) -> Mat3 {
        let mut out = (rho * h - h * rho) * I;
        for (rate, a, ad, ada) in &self.channels {
            out += (a * rho * ad * cr(2.0) - ada * rho - rho * ada) * cr(0.5 * rate);
        }
        out
    }

    fn rk4(&self, rho: &Mat3, hams: &[Mat3; 3], h: f64) -> Mat3 {
        let half = cr(0.5 * h);
        let k1 = self.rhs(rho, &hams[0]);
        let k2 = self.rhs(&(rho + k1 * half), &hams[1]);
        let k3 = self.rhs(&(rho + k2 * half), &hams[1]);
        let k4 = self.rhs(&(rho + k3 * cr(h)), &hams[2]);
        let next = rho + (k1 + (k2 + k3) * cr(2.0) + k4) * cr(h / 6.0);
        hermitian_part(&next)
    }
}

/// One recorded point of a trajectory (start of each RK4 step, plus the final time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSnapshot {
    pub t: f64,
    pub rho: Mat3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladOutcome {
    pub final_state: DensityMatrix3,
    pub record: Option<Vec<StateSnapshot>>,
}

/// Evolves `rho0` under the master equation, symmetrising after every step.
///
/// Positivity is monitored, not enforced: an eigenvalue below −1e-6 aborts with
/// [`Error::Positivity`].
pub fn lindblad_evolve(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix3,
    noise: &NoiseModel,
    record: bool,
) -> Result<LindbladOutcome> {
    let diss = Dissipator::new(noise);
    let mut rho = *rho0.matrix();
    let mut snapshots = record.then(Vec::new);
    let check = |t: f64, rho: &Mat3| -> Result<()> {
        let min = hermitian_eigenvalues(rho)[0];
        if min < POSITIVITY_TOL || !min.is_finite() {
            return Err(Error::Positivity { t, min_eigenvalue: min });
        }
        Ok(())
    };
    for (i, step) in steps(schedule, noise.errors()).enumerate() {
        if let Some(s) = snapshots.as_mut() {
            s.push(StateSnapshot { t: step.t, rho });
        }
        rho = diss.rk4(&rho, &step.hams, step.h);
        if i % POSITIVITY_STRIDE == 0 {
            check(step.t + step.h, &rho)?;
        }
    }
    check(schedule.total(), &rho)?;
    if let Some(s) = snapshots.as_mut() {
        s.push(StateSnapshot {
            t: schedule.total(),
            rho,
        });
    }
    Ok(LindbladOutcome {
        final_state: DensityMatrix3::from_raw(rho),
        record: snapshots,
    })
}

/// The linear map `ρ(0) → ρ(T)`, stored as the images of the nine Hermitian basis operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    images: [Mat3; 9],
}

impl Superoperator {
    pub fn apply(&self, rho: &Mat3) -> Mat3 {
        hermitian_coordinates(rho)
            .iter()
            .zip(self.images.iter())
            .fold(Mat3::zeros(), |acc, (&x, img)| acc + img * x)
    }

    pub fn images(&self) -> &[Mat3; 9] {
        &self.images
    }
}

/// The master-equation generator in the real coordinates of [`hermitian_basis`].
type Generator = SMatrix<f64, 9, 9>;

fn generator_of(f: impl Fn(&Mat3) -> Mat3) -> Generator {
    let basis = hermitian_basis();
    let images = basis.map(|b| hermitian_coordinates(&f(&b)));
    Generator::from_fn(|i, j| images[j][i].re)
}

/// Propagates the nine Hermitian basis operators once; applying the map reproduces
/// direct propagation.
///
/// Within a segment the generator is `Ω₀(t) G₀ + Ω₁(t) G₁ + G_D`, so the same RK4
/// scheme as [`lindblad_evolve`] runs on a real 9×9 matrix. Hermitian operators have
/// real coordinates, so no symmetrisation is needed.
pub fn lindblad_superoperator(schedule: &PulseSchedule, noise: &NoiseModel) -> Result<Superoperator> {
    let diss = Dissipator::new(noise);
    let zero = Mat3::zeros();
    let dissipator = generator_of(|rho| diss.rhs(rho, &zero));
    let errors = noise.errors();
    let (w0, w1) = (1.0 + errors.eps0, 1.0 + errors.eps1);
    let h = 2.0 * schedule.dt();
    let mut map = Generator::identity();
    for segment in [Segment::First, Segment::Second] {
        let unit = |omega0: f64, omega1: f64| {
            LambdaHamiltonian::new(omega0, omega1, schedule.phase(segment))
                .with_channel0_phase(schedule.channel0_phase(segment))
                .matrix()
        };
        let (a0, a1) = (unit(1.0, 0.0), unit(0.0, 1.0));
        let g0 = generator_of(|rho| (rho * a0 - a0 * rho) * I);
        let g1 = generator_of(|rho| (rho * a1 - a1 * rho) * I);
        let at = |k: usize| g0 * (w0 * schedule.omega0()[k]) + g1 * (w1 * schedule.omega1()[k]) + dissipator;
        let (start, end) = schedule.segment_range(segment);
        for k in (start..end).step_by(2) {
            let (l0, lm, l1) = (at(k), at(k + 1), at(k + 2));
            let k1 = l0 * map;
            let k2 = lm * (map + k1 * (0.5 * h));
            let k3 = lm * (map + k2 * (0.5 * h));
            let k4 = l1 * (map + k3 * h);
            map += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        }
    }
    if map.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("superoperator propagation produced non-finite entries".into()));
    }
    let basis = hermitian_basis();
    let images = std::array::from_fn(|j| {
        basis
            .iter()
            .enumerate()
            .fold(Mat3::zeros(), |acc, (i, b)| acc + b * cr(map[(i, j)]))
    });
    Ok(Superoperator { images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{propagate_unitary, RabiErrors};
    use crate::gate::{compile_noncyclic_gate, CompileOptions, GateSpec, PulseSchedule};
    use crate::linalg::{embed_qubit, max_abs3, op_norm3, Vec2, Vec3, C64};

    fn schedule() -> PulseSchedule {
        let spec = GateSpec::new(1.1, 0.4).unwrap();
        compile_noncyclic_gate(&spec, 0.5, 29.5, CompileOptions { samples_per_segment: 1000 }).unwrap()
    }

    #[test]
    fn noiseless_matches_unitary_conjugation() {
        let s = schedule();
        let psi = embed_qubit(&Vec2::new(cr(0.6), C64::new(0.0, 0.8)));
        let rho0 = DensityMatrix3::pure(&psi).unwrap();
        let out = lindblad_evolve(&s, &rho0, &NoiseModel::noiseless(), false).unwrap();
        let u = propagate_unitary(&s, RabiErrors::default()).unwrap();
        let expect = u * rho0.matrix() * u.adjoint();
        assert!(op_norm3(&(out.final_state.matrix() - expect)) < 1e-8);
    }

    #[test]
    fn excited_decay_without_drive() {
        // H = 0, ρ = |e⟩⟨e|: P_e(t) = exp(−2Γ₁ t), split equally into |0⟩ and |1⟩
        let s = PulseSchedule::zero(50.0, 500).unwrap();
        let gamma1 = 0.01;
        let noise = NoiseModel::new(gamma1, 0.0, 0.0, 0.0).unwrap();
        let out = lindblad_evolve(&s, &DensityMatrix3::basis(1), &noise, true).unwrap();
        let rec = out.record.unwrap();
        let mut last = 1.0 + 1e-15;
        for snap in &rec {
            let pe = snap.rho[(1, 1)].re;
            assert!(pe < last);
            last = pe;
            assert!((pe - (-2.0 * gamma1 * snap.t).exp()).abs() < 1e-9);
            assert!((snap.rho[(0, 0)].re - snap.rho[(2, 2)].re).abs() < 1e-14);
        }
        assert_eq!(rec.last().unwrap().t, 50.0);
    }

    #[test]
    fn dephasing_leaves_qubit_coherence() {
        // σ₂ has equal entries on |0⟩ and |1⟩, so qubit coherences survive pure dephasing
        let s = PulseSchedule::zero(50.0, 1000).unwrap();
        let noise = NoiseModel::new(0.0, 0.05, 0.0, 0.0).unwrap();
        let plus = Vec3::new(cr(1.0), cr(0.0), cr(1.0));
        let out = lindblad_evolve(&s, &DensityMatrix3::pure(&plus).unwrap(), &noise, false).unwrap();
        assert!((out.final_state.matrix()[(0, 2)] - cr(0.5)).norm() < 1e-12);
        // |0⟩–|e⟩ coherence: ½Γ₂(2·(−1)·2 − 1 − 4) = −9Γ₂/2
        let pe = Vec3::new(cr(1.0), cr(1.0), cr(0.0));
        let out = lindblad_evolve(&s, &DensityMatrix3::pure(&pe).unwrap(), &noise, false).unwrap();
        let expect = 0.5 * (-4.5 * 0.05 * 50.0_f64).exp();
        assert!((out.final_state.matrix()[(0, 1)].re - expect).abs() < 1e-8);
    }

    #[test]
    fn superoperator_matches_direct() {
        let s = schedule();
        let noise = NoiseModel::new(0.002, 0.001, 0.05, -0.1).unwrap();
        let map = lindblad_superoperator(&s, &noise).unwrap();
        let psi = embed_qubit(&Vec2::new(cr(0.8), C64::new(0.36, 0.48)));
        let rho0 = DensityMatrix3::pure(&psi).unwrap();
        let direct = lindblad_evolve(&s, &rho0, &noise, false).unwrap();
        assert!(max_abs3(&(map.apply(rho0.matrix()) - direct.final_state.matrix())) < 1e-13);
    }
}
