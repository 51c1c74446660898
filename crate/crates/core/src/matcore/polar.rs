use super::eigen::eig_hermitian_with;
use super::matrix::ComplexMatrix;
use super::Tolerances;
use crate::error::{Error, Result};

/// Unitary polar factor of `m`: the unitary closest to `m` in Frobenius norm.
pub fn unitarize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    unitarize_with(m, &Tolerances::default())
}

pub fn unitarize_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    let gram = m.adjoint().matmul(m);
    let gram = (&gram + &gram.adjoint()).scale_real(0.5);
    let eig = eig_hermitian_with(&gram, tol)?;
    let min_singular = eig.values.first().copied().unwrap_or(1.0).max(0.0).sqrt();
    if min_singular < tol.singular {
        return Err(Error::Singular { min_singular });
    }
    let inv_sqrt: Vec<f64> = eig.values.iter().map(|&s| 1.0 / s.sqrt()).collect();
    let v = &eig.vectors;
    let mut u = m.matmul(v).matmul(&ComplexMatrix::diag_real(&inv_sqrt)).matmul(&v.adjoint());

    // Newton–Schulz polishing; quadratically convergent this close to the unitary group.
    let three = ComplexMatrix::identity(n).scale_real(3.0);
    for _ in 0..2 {
        let correction = (&three - &u.adjoint().matmul(&u)).scale_real(0.5);
        u = u.matmul(&correction);
    }
    Ok(u)
}
