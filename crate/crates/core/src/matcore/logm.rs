//! Principal logarithm of a unitary matrix.
//!
//! A unitary `U` is normal, so its Hermitian and anti-Hermitian parts
//! `Re U = (U + U†)/2` and `Im U = (U − U†)/2i` commute and share `U`'s eigenvectors.
//! `Re U` alone cannot separate the phases `θ` and `−θ`; inside every cluster of equal
//! `cos θ` the restriction of `Im U` is diagonalized as well. Eigenphases are then read
//! off as Rayleigh quotients, which keeps them accurate even when the clustering is loose.

use std::f64::consts::PI;

use super::eigen::eig_hermitian_with;
use super::matrix::{ComplexMatrix, C64};
use super::Tolerances;
use crate::error::{Error, Result};

/// Eigenvalues of `Re U` closer than this are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-6;

/// Unitary eigendecomposition `U = V diag(e^{iθ}) V†` with `θ ∈ (−π, π]`.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    pub vectors: ComplexMatrix,
}

pub fn eig_unitary(u: &ComplexMatrix) -> Result<UnitaryEigen> {
    eig_unitary_with(u, &Tolerances::default())
}

pub fn eig_unitary_with(u: &ComplexMatrix, tol: &Tolerances) -> Result<UnitaryEigen> {
    let n = u.ensure_square()?;
    let residual = u.unitary_residual();
    if residual > tol.unitary {
        return Err(Error::NotUnitary { residual });
    }
    let ud = u.adjoint();
    let re = (u + &ud).scale_real(0.5);
    let im = (u - &ud).scale(C64::new(0.0, -0.5));

    let outer = eig_hermitian_with(&re, tol)?;
    let mut vectors = outer.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && outer.values[end] - outer.values[end - 1] <= CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let block = outer.vectors.block(0, start, n, end - start);
            let restricted = block.adjoint().matmul(&im).matmul(&block);
            let inner = eig_hermitian_with(&hermitize(&restricted), tol)?;
            vectors.set_block(0, start, &block.matmul(&inner.vectors));
        }
        start = end;
    }

    let phases = (0..n)
        .map(|j| {
            let v = vectors.column(j);
            let uv = u.apply(&v);
            let q: C64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
            principal_phase(q.arg(), tol.branch)
        })
        .collect();
    Ok(UnitaryEigen { phases, vectors })
}

/// Maps an argument onto `(−π, π]`, sending phases within `snap` of `−π` to `+π`.
pub fn principal_phase(theta: f64, snap: f64) -> f64 {
    let mut t = theta;
    while t > PI {
        t -= 2.0 * PI;
    }
    while t <= -PI + snap {
        t += 2.0 * PI;
    }
    if t > PI {
        PI
    } else {
        t
    }
}

/// Principal logarithm: anti-Hermitian `G` with `e^G = U` and eigenvalues `iθ`, `θ ∈ (−π, π]`.
pub fn logm_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    logm_unitary_with(u, &Tolerances::default())
}

pub fn logm_unitary_with(u: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = eig_unitary_with(u, tol)?;
    let d: Vec<C64> = eig.phases.iter().map(|&t| C64::new(0.0, t)).collect();
    let v = &eig.vectors;
    let g = v.matmul(&ComplexMatrix::diag(&d)).matmul(&v.adjoint());
    // Drop the Hermitian rounding residue.
    Ok((&g - &g.adjoint()).scale_real(0.5))
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}
