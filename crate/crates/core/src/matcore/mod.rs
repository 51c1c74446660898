//! Dense complex linear algebra: Hermitian eigensolver, matrix exponential,
//! principal unitary logarithm and polar projection.

mod eigen;
mod expm;
mod logm;
mod matrix;
mod polar;

#[cfg(test)]
pub(crate) mod test_util;

pub use eigen::{eig_hermitian, eig_hermitian_with, HermitianEigen};
pub use expm::{expm, expm_antihermitian, expm_antihermitian_with};
pub use logm::{eig_unitary, eig_unitary_with, logm_unitary, logm_unitary_with, principal_phase, UnitaryEigen};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};
pub use polar::{unitarize, unitarize_with};

use serde::{Deserialize, Serialize};

/// Numerical thresholds for the kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Max ‖M − M†‖_F accepted by the eigensolver.
    pub hermitian: f64,
    /// Max ‖U†U − I‖_F accepted by the logarithm.
    pub unitary: f64,
    /// Smallest singular value accepted by [`unitarize`].
    pub singular: f64,
    /// Eigenphases within this distance of −π are reported as +π.
    pub branch: f64,
    pub max_jacobi_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { hermitian: 1e-12, unitary: 1e-10, singular: 1e-8, branch: 1e-10, max_jacobi_sweeps: 100 }
    }
}

/// Frobenius distance from `w` to `e^{iφ*} u`, with `φ* = arg tr(u† w)`.
pub fn phase_aligned_distance(w: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    let phase = global_phase(w, u);
    (w - &u.scale(phase)).frobenius_norm()
}

/// Unit phase `e^{iφ*}` maximizing the overlap `Re tr(e^{-iφ} u† w)`.
pub fn global_phase(w: &ComplexMatrix, u: &ComplexMatrix) -> C64 {
    let overlap = u.adjoint().matmul(w).trace();
    if overlap.norm() == 0.0 {
        ONE
    } else {
        overlap / overlap.norm()
    }
}

/// Pauli matrices and friends used across the crate.
pub mod pauli {
    use super::{ComplexMatrix, I, ONE, ZERO};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    /// σ₊ = |0⟩⟨1|
    pub fn raising() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap()
    }

    /// σ₋ = |1⟩⟨0|
    pub fn lowering() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ZERO], vec![ONE, ZERO]]).unwrap()
    }
}
