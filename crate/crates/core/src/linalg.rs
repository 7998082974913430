//! Small dense complex linear algebra used throughout the crate.
//!
//! Every 3×3 object is expressed in the level ordering `(|0⟩, |e⟩, |1⟩)`;
//! 2×2 objects act on the qubit pair `(|0⟩, |1⟩)`.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector2, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
pub type Mat2 = Matrix2<C64>;
pub type Vec3 = Vector3<C64>;
pub type Vec2 = Vector2<C64>;

/// Index of the auxiliary excited level in the 3×3 basis.
pub const EXCITED: usize = 1;
/// Indices of the qubit levels `|0⟩`, `|1⟩` in the 3×3 basis.
pub const QUBIT: [usize; 2] = [0, 2];

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{iθ}`
#[inline]
pub fn expi(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Largest absolute entry; cheap matrix norm for tolerance checks.
pub fn max_abs3(m: &Mat3) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs2(m: &Mat2) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Spectral norm of a 3×3 matrix (largest singular value).
pub fn op_norm3(m: &Mat3) -> f64 {
    let gram = m.adjoint() * m;
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v)).max(0.0).sqrt()
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitian_part(m: &Mat3) -> Mat3 {
    (m + m.adjoint()) * cr(0.5)
}

/// Sorted (ascending) eigenvalues of a Hermitian 3×3 matrix.
pub fn hermitian_eigenvalues(m: &Mat3) -> [f64; 3] {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    v.sort_by(f64::total_cmp);
    v
}

/// Restriction of a 3×3 operator to the qubit block.
pub fn qubit_block(m: &Mat3) -> Mat2 {
    let [a, b] = QUBIT;
    Mat2::new(m[(a, a)], m[(a, b)], m[(b, a)], m[(b, b)])
}

/// Embeds a qubit vector into the three-level space with zero `|e⟩` amplitude.
pub fn embed_qubit(v: &Vec2) -> Vec3 {
    Vec3::new(v[0], C64::new(0.0, 0.0), v[1])
}

/// Global-phase-insensitive overlap `|tr(U†V)| / dim` of two 2×2 operators.
pub fn phase_insensitive_overlap(u: &Mat2, v: &Mat2) -> f64 {
    (u.adjoint() * v).trace().norm() / 2.0
}

/// The nine Hermitian matrices `E_ii`, `E_ij + E_ji`, `i(E_ij − E_ji)` (i < j).
///
/// They form a real basis of 3×3 Hermitian matrices and a complex basis of all 3×3 matrices.
pub fn hermitian_basis() -> [Mat3; 9] {
    let mut out = [Mat3::zeros(); 9];
    let mut k = 0;
    for i in 0..3 {
        out[k][(i, i)] = cr(1.0);
        k += 1;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            out[k][(i, j)] = cr(1.0);
            out[k][(j, i)] = cr(1.0);
            k += 1;
            out[k][(i, j)] = I;
            out[k][(j, i)] = -I;
            k += 1;
        }
    }
    out
}

/// Coordinates of `m` in [`hermitian_basis`]. Real when `m` is Hermitian.
pub fn hermitian_coordinates(m: &Mat3) -> [C64; 9] {
    let mut out = [C64::new(0.0, 0.0); 9];
    let mut k = 0;
    for i in 0..3 {
        out[k] = m[(i, i)];
        k += 1;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            // m_ij = a + i b, m_ji = a − i b for Hermitian input; in general solve the 2×2 system.
            let (mij, mji) = (m[(i, j)], m[(j, i)]);
            out[k] = (mij + mji) * 0.5;
            k += 1;
            out[k] = (mij - mji) * C64::new(0.0, -0.5);
            k += 1;
        }
    }
    out
}
