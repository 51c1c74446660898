//! Checks that a loop transports its degenerate subspace by the target gate.
//!
//! The frame `F(t) = e^{tX} E` spans the eigenvalue-1 eigenspace of `H(t)`.
//! Its overlaps between neighbouring grid points are multiplied in time order
//! (later factors on the left) to give the discrete Wilson line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loopsynth::{closure_residual, exp_tx, hamiltonian_at, LoopPlan};
use crate::matcore::{eig_hermitian, expm, global_phase, phase_aligned_distance, unitarize, ComplexMatrix};

pub const MIN_WILSON_STEPS: usize = 16;

/// Grid used for the isospectrality check.
const ISOSPECTRAL_GRID: usize = 17;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub closure_residual: f64,
    /// `E† X E`, the upper-left block of the loop operator.
    pub connection: ComplexMatrix,
    pub wilson_steps: usize,
    /// Unitarized ordered overlap product.
    pub wilson_holonomy: ComplexMatrix,
    /// Phase-aligned distance of `wilson_holonomy` to `e^{−connection}`.
    pub target_distance: f64,
    /// Phase-aligned distance of the ordered product before unitarization.
    pub raw_product_distance: f64,
    /// Largest deviation of the spectrum of `H(t)` from that of `P₀` on a grid.
    pub isospectral_residual: f64,
    /// `E† e^X E`: how the frame itself returns after one traversal.
    pub frame_return: ComplexMatrix,
    /// Distance of `frame_return` from the nearest multiple of the identity.
    pub frame_return_deviation: f64,
}

/// `F(t) = e^{tX} E`.
pub fn frame_at(plan: &LoopPlan, t: f64) -> ComplexMatrix {
    exp_tx(plan, t).block(0, 0, plan.dim(), plan.k)
}

pub fn connection_of(plan: &LoopPlan) -> ComplexMatrix {
    plan.generator()
}

/// Ordered overlap product `Π_{m=N−1..0} F(t_{m+1})† F(t_m)` for the frame `F(t) V`.
pub fn wilson_product(plan: &LoopPlan, steps: usize, gauge: Option<&ComplexMatrix>) -> Result<ComplexMatrix> {
    if steps < MIN_WILSON_STEPS {
        return Err(Error::InvalidArgument(format!(
            "wilson line needs at least {MIN_WILSON_STEPS} steps, got {steps}"
        )));
    }
    if let Some(v) = gauge {
        if v.rows() != plan.k || v.cols() != plan.k {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", plan.k),
                found: format!("{}x{}", v.rows(), v.cols()),
            });
        }
    }
    let frame = |t: f64| {
        let f = frame_at(plan, t);
        match gauge {
            Some(v) => f.matmul(v),
            None => f,
        }
    };
    let mut product = ComplexMatrix::identity(plan.k);
    let mut prev = frame(0.0);
    for m in 0..steps {
        let next = frame((m + 1) as f64 / steps as f64);
        product = next.adjoint().matmul(&prev).matmul(&product);
        prev = next;
    }
    Ok(product)
}

pub fn wilson_holonomy(plan: &LoopPlan, steps: usize) -> Result<HolonomyReport> {
    let raw = wilson_product(plan, steps, None)?;
    let wilson = unitarize(&raw)?;
    let connection = connection_of(plan);
    let target = expm(&-&connection)?;
    let frame_return = frame_at(plan, 1.0).block(0, 0, plan.k, plan.k);
    let id = ComplexMatrix::identity(plan.k);
    Ok(HolonomyReport {
        closure_residual: closure_residual(plan),
        target_distance: phase_aligned_distance(&wilson, &target),
        raw_product_distance: phase_aligned_distance(&raw, &target),
        isospectral_residual: isospectral_residual(plan, ISOSPECTRAL_GRID)?,
        frame_return_deviation: phase_aligned_distance(&frame_return, &id),
        connection,
        wilson_steps: steps,
        wilson_holonomy: wilson,
        frame_return,
    })
}

/// Gate enacted by slow traversal, up to the dynamical phase:
/// `(E† e^X E) e^{−A}`.
pub fn adiabatic_gate(plan: &LoopPlan) -> Result<ComplexMatrix> {
    let frame_return = frame_at(plan, 1.0).block(0, 0, plan.k, plan.k);
    Ok(frame_return.matmul(&expm(&-&connection_of(plan))?))
}

/// `max_t max_i |μ_i(H(t)) − μ_i(P₀)|` over `grid` evenly spaced points.
pub fn isospectral_residual(plan: &LoopPlan, grid: usize) -> Result<f64> {
    let dim = plan.dim();
    let reference: Vec<f64> = (0..dim).map(|i| if i < dim - plan.k { 0.0 } else { 1.0 }).collect();
    let mut worst: f64 = 0.0;
    for i in 0..grid {
        let t = i as f64 / (grid - 1).max(1) as f64;
        let eig = eig_hermitian(&hamiltonian_at(plan, t))?;
        for (a, b) in eig.values.iter().zip(&reference) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Aligns `w` to `u` by the trace phase.
pub fn align_phase(w: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    w.scale(global_phase(w, u).conj())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::gatelog::{GateSpec, GATE_NAMES};
    use crate::loopsynth::{plan_doubled, plan_minimal, AlphaPolicy};
    use crate::matcore::test_util::{random_unitary, rng};
    use crate::matcore::{I, ZERO};

    fn doubled(name: &str, n: u32) -> LoopPlan {
        let g = GateSpec::named(name).unwrap();
        plan_doubled(&g, &vec![n; g.dim()], AlphaPolicy::Keep).unwrap()
    }

    #[test]
    fn frame_starts_on_the_injection() {
        let p = doubled("hadamard", 1);
        assert_eq!(frame_at(&p, 0.0), p.injection());
    }

    #[test]
    fn frame_is_orthonormal_eigenbasis() {
        for name in ["hadamard", "cnot", "t_gate"] {
            let p = doubled(name, 1);
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                let f = frame_at(&p, t);
                let gram = f.adjoint().matmul(&f);
                assert!((&gram - &ComplexMatrix::identity(p.k)).frobenius_norm() <= 1e-10);
                let h = hamiltonian_at(&p, t);
                assert!((&h.matmul(&f) - &f).frobenius_norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn frame_returns_to_the_subspace() {
        let p = doubled("qft2", 1);
        let f = frame_at(&p, 1.0);
        assert!(f.block(p.k, 0, p.k, p.k).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn identity_connection_vanishes() {
        let g = GateSpec::named("identity").unwrap();
        let p = plan_minimal(&g, 1, 1, AlphaPolicy::Keep).unwrap();
        assert!(connection_of(&p).frobenius_norm() < 1e-15);
    }

    #[test]
    fn pauli_z_connection() {
        let p = doubled("pauli_z", 1);
        let expected = ComplexMatrix::diag(&[ZERO, -I * PI]);
        assert!((&connection_of(&p) - &expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn hadamard_connection_exponentiates_to_hadamard() {
        let p = doubled("hadamard", 1);
        let g = expm(&-&connection_of(&p)).unwrap();
        assert!((&g - &GateSpec::named("hadamard").unwrap().u).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn too_few_steps_rejected() {
        assert!(wilson_holonomy(&doubled("pauli_x", 1), 8).is_err());
    }

    #[test]
    fn identity_holonomy() {
        let r = wilson_holonomy(&doubled("identity", 1), 4096).unwrap();
        assert!(r.target_distance <= 1e-6, "{}", r.target_distance);
        assert!((&r.wilson_holonomy - &ComplexMatrix::identity(2)).frobenius_norm() <= 1e-6);
    }

    #[test]
    fn pauli_z_holonomy() {
        let p = doubled("pauli_z", 1);
        let coarse = wilson_holonomy(&p, 4096).unwrap();
        let fine = wilson_holonomy(&p, 16384).unwrap();
        assert!(coarse.target_distance <= 2e-3 && coarse.raw_product_distance <= 2e-3);
        assert!(fine.target_distance <= 5e-4 && fine.raw_product_distance <= 5e-4);
        assert!(coarse.closure_residual <= 1e-10);
    }

    #[test]
    fn cnot_holonomy() {
        let r = wilson_holonomy(&doubled("cnot", 1), 4096).unwrap();
        assert!(r.target_distance <= 5e-3);
        assert!(r.raw_product_distance <= 5e-3);
    }

    // Each overlap is the constant matrix E† e^{−X/N} E. In the eigenbasis of A
    // it is diagonal with entries m = cos(ν/N) − i(λ/ν) sin(ν/N), so the raw
    // product is Ω diag(m^N) Ω†, available in closed form.
    #[test]
    fn raw_product_matches_closed_form() {
        for name in GATE_NAMES {
            let p = doubled(name, 1);
            let n = 512;
            let raw = wilson_product(&p, n, None).unwrap();
            let d: Vec<_> = p
                .lambdas
                .iter()
                .zip(&p.nus)
                .map(|(&l, &nu)| {
                    let h = 1.0 / n as f64;
                    crate::matcore::C64::new((nu * h).cos(), -(l / nu) * (nu * h).sin()).powu(n as u32)
                })
                .collect();
            let oracle = p.omega.matmul(&ComplexMatrix::diag(&d)).matmul(&p.omega.adjoint());
            assert!((&raw - &oracle).frobenius_norm() <= 1e-10, "{name}");
        }
    }

    #[test]
    fn raw_product_converges_linearly() {
        for name in GATE_NAMES {
            let p = doubled(name, 1);
            let d: Vec<f64> =
                [1024, 2048, 4096].iter().map(|&n| wilson_holonomy(&p, n).unwrap().raw_product_distance).collect();
            for w in d.windows(2) {
                let ratio = w[0] / w[1];
                assert!((1.6..=2.4).contains(&ratio), "{name}: {ratio}");
            }
        }
    }

    // The modulus error cancels in the polar factor; what is left is a phase
    // error λα²/(3N²) per component.
    #[test]
    fn unitarized_product_converges_quadratically() {
        let p = doubled("phase_s", 1);
        let a = wilson_holonomy(&p, 512).unwrap().target_distance;
        let b = wilson_holonomy(&p, 1024).unwrap().target_distance;
        assert!((3.6..=4.4).contains(&(a / b)), "{}", a / b);
    }

    #[test]
    fn gauge_covariance() {
        let mut r = rng(5);
        for name in ["hadamard", "qft2"] {
            let p = doubled(name, 1);
            let v = random_unitary(&mut r, p.k);
            let w = wilson_product(&p, 4096, None).unwrap();
            let wv = wilson_product(&p, 4096, Some(&v)).unwrap();
            let expected = v.adjoint().matmul(&w).matmul(&v);
            assert!((&wv - &expected).frobenius_norm() <= 1e-6);
        }
    }

    #[test]
    fn holonomy_independent_of_winding() {
        let one = wilson_holonomy(&doubled("pauli_z", 1), 8192).unwrap();
        let two = wilson_holonomy(&doubled("pauli_z", 2), 8192).unwrap();
        assert!(phase_aligned_distance(&one.wilson_holonomy, &two.wilson_holonomy) <= 5e-3);
        assert_eq!(one.connection, two.connection);
    }

    #[test]
    fn minimal_plan_holonomy() {
        let g = GateSpec::named("pauli_z").unwrap();
        let j = g.lambda.iter().position(|l| l.abs() < 1e-12).unwrap();
        let p = plan_minimal(&g, j, 1, AlphaPolicy::Keep).unwrap();
        let r = wilson_holonomy(&p, 4096).unwrap();
        assert!(r.closure_residual <= 1e-10);
        assert!(phase_aligned_distance(&r.wilson_holonomy, &g.u) <= 2e-3);
    }

    #[test]
    fn isospectral_along_the_loop() {
        for name in ["cnot", "t_gate"] {
            assert!(isospectral_residual(&doubled(name, 1), 17).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn doubled_frames_return_up_to_sign() {
        for name in GATE_NAMES {
            let r = wilson_holonomy(&doubled(name, 1), 64).unwrap();
            assert!(r.frame_return_deviation <= 1e-12, "{name}");
            let g = GateSpec::named(name).unwrap();
            assert!(phase_aligned_distance(&adiabatic_gate(&doubled(name, 2)).unwrap(), &g.u) <= 1e-9);
        }
    }

    // A minimal loop returns the frame as e^{A} off v and (−1)ⁿ e^{iλ} along v, so
    // slow traversal applies P⊥ + (−1)ⁿ e^{−iλ} vv† rather than the gate.
    #[test]
    fn minimal_adiabatic_gate_is_not_the_target() {
        let g = GateSpec::named("phase_s").unwrap();
        for j in 0..2 {
            for n in [1, 2] {
                let p = plan_minimal(&g, j, n, AlphaPolicy::Keep).unwrap();
                let v = ComplexMatrix::column_vector(&g.eigvec(j).unwrap());
                let vv = v.matmul(&v.adjoint());
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let phase = crate::matcore::C64::from_polar(sign, -g.lambda[j]);
                let expected = &(&ComplexMatrix::identity(2) - &vv) + &vv.scale(phase);
                assert!((&adiabatic_gate(&p).unwrap() - &expected).frobenius_norm() <= 1e-12);
            }
        }
    }
}
