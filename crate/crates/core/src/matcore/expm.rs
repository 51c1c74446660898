//! Matrix exponential by scaling and squaring a truncated Taylor series.

use super::eigen::eig_hermitian_with;
use super::matrix::{ComplexMatrix, C64};
use super::Tolerances;
use crate::error::{Error, Result};

/// Norm the scaled argument is pushed below before the series is summed.
const SCALED_NORM: f64 = 0.25;
const MAX_TERMS: usize = 40;

/// `e^M` for any square matrix.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::InvalidArgument("expm of a matrix with non-finite entries".into()));
    }
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let norm = m.one_norm();
    let squarings = if norm > SCALED_NORM { (norm / SCALED_NORM).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale_real(0.5f64.powi(squarings as i32));
    let mut result = taylor(&scaled);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

fn taylor(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = term.matmul(m).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.one_norm() <= f64::EPSILON * 1e-2 * sum.one_norm() {
            break;
        }
    }
    sum
}

/// `e^M` for anti-Hermitian `M`, via the spectral decomposition of the Hermitian `-iM`.
///
/// Exactly unitary up to the accuracy of the eigenvectors; used to cross-check [`expm`].
pub fn expm_antihermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    expm_antihermitian_with(m, &Tolerances::default())
}

pub fn expm_antihermitian_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    m.ensure_square()?;
    let residual = m.antihermitian_residual();
    if residual > tol.hermitian * m.frobenius_norm().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "expm_antihermitian: input is not anti-hermitian (residual {residual:.3e})"
        )));
    }
    let h = m.scale(C64::new(0.0, -1.0));
    let eig = eig_hermitian_with(&h, tol)?;
    let phases: Vec<C64> = eig.values.iter().map(|&w| C64::new(0.0, w).exp()).collect();
    let v = &eig.vectors;
    Ok(v.matmul(&ComplexMatrix::diag(&phases)).matmul(&v.adjoint()))
}
