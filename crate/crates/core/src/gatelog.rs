//! Target gates and their generators in the holonomy convention `U = e^{-A}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian_with, logm_unitary_with, ComplexMatrix, Tolerances, C64, I, ONE, ZERO};

/// Names accepted by [`resolve_gate`].
pub const GATE_NAMES: [&str; 11] =
    ["identity", "pauli_x", "pauli_y", "pauli_z", "hadamard", "phase_s", "t_gate", "cnot", "cz", "swap", "qft2"];

/// Raw matrices must be unitary to this accuracy.
pub const RAW_UNITARY_TOL: f64 = 1e-8;

/// Eigenphases closer than this to −π are pinned to −π exactly.
const LAMBDA_SNAP: f64 = 1e-10;

/// Where a target gate comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSource {
    Named(String),
    Matrix(ComplexMatrix),
}

/// Standard matrix for a named gate. Two-qubit gates use the first qubit as the
/// most significant bit (so `cnot` is controlled on the first qubit).
pub fn resolve_gate(name: &str) -> Result<ComplexMatrix> {
    let r = |x: f64| C64::new(x, 0.0);
    let h = FRAC_1_SQRT_2;
    let m = match name {
        "identity" => ComplexMatrix::identity(2),
        "pauli_x" => ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])?,
        "pauli_y" => ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])?,
        "pauli_z" => ComplexMatrix::diag_real(&[1.0, -1.0]),
        "hadamard" => ComplexMatrix::from_rows(&[vec![r(h), r(h)], vec![r(h), r(-h)]])?,
        "phase_s" => ComplexMatrix::diag(&[ONE, I]),
        "t_gate" => ComplexMatrix::diag(&[ONE, C64::from_polar(1.0, PI / 4.0)]),
        "cnot" => ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]),
        "cz" => ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]),
        "swap" => ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        "qft2" => ComplexMatrix::from_fn(4, 4, |j, k| C64::from_polar(0.5, PI / 2.0 * (j * k % 4) as f64)),
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    Ok(m)
}

/// Validates a raw gate matrix: square and unitary within [`RAW_UNITARY_TOL`].
pub fn resolve_matrix(m: ComplexMatrix) -> Result<ComplexMatrix> {
    m.ensure_square()?;
    let residual = m.unitary_residual();
    if residual > RAW_UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(m)
}

pub fn resolve(source: &GateSource) -> Result<ComplexMatrix> {
    match source {
        GateSource::Named(name) => resolve_gate(name),
        GateSource::Matrix(m) => resolve_matrix(m.clone()),
    }
}

/// A target unitary together with its generator and eigendata.
///
/// `u = e^{-a}`, `a · omega = omega · diag(i λ)`, λ ascending in `[−π, π)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateSpec {
    pub name: Option<String>,
    pub u: ComplexMatrix,
    pub a: ComplexMatrix,
    pub omega: ComplexMatrix,
    pub lambda: Vec<f64>,
}

impl GateSpec {
    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn named(name: &str) -> Result<Self> {
        let mut g = gate_generator(&resolve_gate(name)?)?;
        g.name = Some(name.to_string());
        Ok(g)
    }

    /// Column `j` of `omega`.
    pub fn eigvec(&self, j: usize) -> Result<Vec<C64>> {
        if j >= self.dim() {
            return Err(Error::EigvecOutOfRange { index: j, dim: self.dim() });
        }
        Ok(self.omega.column(j))
    }

    /// `‖a Ω − Ω diag(iλ)‖_F`
    pub fn eigen_residual(&self) -> f64 {
        let d: Vec<C64> = self.lambda.iter().map(|&l| I * l).collect();
        (&self.a.matmul(&self.omega) - &self.omega.matmul(&ComplexMatrix::diag(&d))).frobenius_norm()
    }
}

/// Generator `A = −log U` (principal branch) plus the eigendata of `A`.
pub fn gate_generator(u: &ComplexMatrix) -> Result<GateSpec> {
    gate_generator_with(u, &Tolerances::default())
}

pub fn gate_generator_with(u: &ComplexMatrix, tol: &Tolerances) -> Result<GateSpec> {
    let a = -logm_unitary_with(u, tol)?;
    // A v = iλ v  ⇔  (−iA) v = λ v
    let eig = eig_hermitian_with(&a.scale(-I), tol)?;
    let lambda: Vec<f64> = eig.values.iter().map(|&l| if l < -PI + LAMBDA_SNAP { -PI } else { l }).collect();
    let mut omega = eig.vectors;
    for j in 0..omega.cols() {
        let col = omega.column(j);
        if let Some(first) = col.iter().find(|z| z.norm() > 1e-12) {
            let phase = first.conj() / first.norm();
            let fixed: Vec<C64> = col.iter().map(|z| z * phase).collect();
            omega.set_column(j, &fixed);
        }
    }
    Ok(GateSpec { name: None, u: u.clone(), a, omega, lambda })
}
