//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::matrix::{ComplexMatrix, C64};
use super::Tolerances;
use crate::error::{Error, Result};

/// Eigendecomposition `M = V diag(w) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let w = ComplexMatrix::diag_real(&self.values);
        self.vectors.matmul(&w).matmul(&self.vectors.adjoint())
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with(m, &Tolerances::default())
}

pub fn eig_hermitian_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    let n = m.ensure_square()?;
    let residual = m.hermitian_residual();
    if residual > tol.hermitian * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }

    // Work on the exactly Hermitian part so rounding asymmetry cannot stall the sweeps.
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = 4.0 * n as f64 * f64::EPSILON * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps >= tol.max_jacobi_sweeps {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    Ok(HermitianEigen { values: order.iter().map(|&i| diag[i]).collect(), vectors: v.permute_columns(&order) })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · G(θ)` acting on the (p, q) plane,
/// where φ = arg a[p][q] and G is the real symmetric Jacobi rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that would not change the diagonal in floating point.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e_minus = phase.conj();
    let n = a.rows();

    // A ← A J
    for r in 0..n {
        let xp = a[(r, p)];
        let xq = a[(r, q)];
        a[(r, p)] = xp * c - xq * e_minus * s;
        a[(r, q)] = xp * s + xq * e_minus * c;
    }
    // A ← J† A
    for col in 0..n {
        let xp = a[(p, col)];
        let xq = a[(q, col)];
        a[(p, col)] = xp * c - xq * phase * s;
        a[(q, col)] = xp * s + xq * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    // V ← V J
    for r in 0..n {
        let xp = v[(r, p)];
        let xq = v[(r, q)];
        v[(r, p)] = xp * c - xq * e_minus * s;
        v[(r, q)] = xp * s + xq * e_minus * c;
    }
}
