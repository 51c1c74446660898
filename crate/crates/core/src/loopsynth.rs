//! Closed loops of isospectral Hamiltonians `H(t) = e^{tX} P₀ e^{−tX}`.
//!
//! The degenerate subspace occupies the first `k` basis states; the upper-left
//! `k × k` block of `X` is the gate generator `A`, so the induced holonomy is
//! `e^{−A} = U`. Two families are built:
//!
//! * minimal: one extra level, `X = [[A, w], [−w†, i s]]` with `w = α v_j`, `s = −λ_j`;
//! * doubled: `k` extra levels, `X = [[A, Ω D], [−D Ω†, −i Λ]]`.
//!
//! Closure holds when every `ν = √(λ² + α²)` is an integer multiple of π.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeffora::bordered_closed_form;
use crate::error::{Error, Result};
use crate::gatelog::GateSpec;
use crate::matcore::{expm, pauli, ComplexMatrix, C64, I};

/// Below this an amplitude counts as a collapsed loop direction.
pub const DEGENERATE_ALPHA: f64 = 1e-9;

/// What to do when a component's amplitude `α_k` comes out zero (`λ_k = −π`, `n_k = 1`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaPolicy {
    /// Keep `α_k = 0` and flag the component.
    #[default]
    Keep,
    /// Raise the winding to 2, giving `α_k² = 3π²`.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LoopVariant {
    Minimal {
        eigvec: usize,
    },
    Doubled,
    /// An operator supplied directly; evaluated with the generic exponential.
    Explicit,
}

/// A loop operator together with the data its closed forms need.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopPlan {
    pub variant: LoopVariant,
    pub x: ComplexMatrix,
    /// Dimension of the degenerate subspace.
    pub k: usize,
    pub windings: Vec<u32>,
    pub alphas: Vec<f64>,
    pub nus: Vec<f64>,
    /// Corner entry `s` of the minimal variant.
    pub s_param: Option<f64>,
    /// Eigenvalue phases of the upper block, `A Ω = Ω diag(iλ)`.
    pub lambdas: Vec<f64>,
    pub omega: ComplexMatrix,
    /// Components whose loop direction collapsed (`α = 0`).
    pub degenerate_directions: Vec<usize>,
}

fn amplitude(lambda: f64, winding: u32) -> Result<f64> {
    if winding == 0 {
        return Err(Error::WindingTooSmall { winding, lambda });
    }
    let a2 = (winding as f64 * PI).powi(2) - lambda * lambda;
    if a2 < -1e-12 {
        return Err(Error::WindingTooSmall { winding, lambda });
    }
    Ok(a2.max(0.0).sqrt())
}

fn resolve_winding(lambda: f64, winding: u32, policy: AlphaPolicy) -> Result<(u32, f64)> {
    let alpha = amplitude(lambda, winding)?;
    if alpha <= DEGENERATE_ALPHA && policy == AlphaPolicy::Strict {
        let bumped = winding + 1;
        return Ok((bumped, amplitude(lambda, bumped)?));
    }
    Ok((winding, alpha))
}

/// Bordered `(k+1)`-dimensional loop through eigenvector `j` of the generator.
pub fn plan_minimal(gate: &GateSpec, j: usize, winding: u32, policy: AlphaPolicy) -> Result<LoopPlan> {
    let k = gate.dim();
    let v = gate.eigvec(j)?;
    let lambda = gate.lambda[j];
    let (winding, alpha) = resolve_winding(lambda, winding, policy)?;
    let s = -lambda;

    let w: Vec<C64> = v.iter().map(|z| z * alpha).collect();
    let wcol = ComplexMatrix::column_vector(&w);
    let x = ComplexMatrix::from_blocks(&gate.a, &wcol, &-&wcol.adjoint(), &ComplexMatrix::diag(&[I * s]));
    Ok(LoopPlan {
        variant: LoopVariant::Minimal { eigvec: j },
        x,
        k,
        windings: vec![winding],
        alphas: vec![alpha],
        nus: vec![winding as f64 * PI],
        s_param: Some(s),
        lambdas: gate.lambda.clone(),
        omega: gate.omega.clone(),
        degenerate_directions: if alpha <= DEGENERATE_ALPHA { vec![j] } else { vec![] },
    })
}

/// `2k`-dimensional loop coupling every eigenvector to its own ancilla level.
pub fn plan_doubled(gate: &GateSpec, windings: &[u32], policy: AlphaPolicy) -> Result<LoopPlan> {
    plan_doubled_from_parts(&gate.a, &gate.omega, &gate.lambda, windings, policy)
}

/// Doubled construction from explicit eigendata `A Ω = Ω diag(iλ)`; `λ` need not be sorted.
pub fn plan_doubled_from_parts(
    a: &ComplexMatrix,
    omega: &ComplexMatrix,
    lambdas: &[f64],
    windings: &[u32],
    policy: AlphaPolicy,
) -> Result<LoopPlan> {
    let k = a.ensure_square()?;
    if windings.len() != k {
        return Err(Error::WindingCount { expected: k, found: windings.len() });
    }
    let mut resolved = Vec::with_capacity(k);
    let mut alphas = Vec::with_capacity(k);
    for (&l, &n) in lambdas.iter().zip(windings) {
        let (n, alpha) = resolve_winding(l, n, policy)?;
        resolved.push(n);
        alphas.push(alpha);
    }
    let d = ComplexMatrix::diag_real(&alphas);
    let omega_d = omega.matmul(&d);
    let lower_right = ComplexMatrix::diag(&lambdas.iter().map(|&l| -I * l).collect::<Vec<_>>());
    let x = ComplexMatrix::from_blocks(a, &omega_d, &-&omega_d.adjoint(), &lower_right);
    let nus = resolved.iter().map(|&n| n as f64 * PI).collect();
    Ok(LoopPlan {
        variant: LoopVariant::Doubled,
        x,
        k,
        windings: resolved,
        degenerate_directions: alphas
            .iter()
            .enumerate()
            .filter(|(_, &a)| a <= DEGENERATE_ALPHA)
            .map(|(i, _)| i)
            .collect(),
        alphas,
        nus,
        s_param: None,
        lambdas: lambdas.to_vec(),
        omega: omega.clone(),
    })
}

/// Wraps an arbitrary anti-Hermitian operator whose first `k` levels carry the subspace.
pub fn plan_explicit(x: ComplexMatrix, k: usize) -> Result<LoopPlan> {
    let dim = x.ensure_square()?;
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!("subspace dimension {k} out of range for {dim}x{dim} operator")));
    }
    let residual = x.antihermitian_residual();
    if residual > 1e-12 * x.frobenius_norm().max(1.0) {
        return Err(Error::InvalidArgument(format!("loop operator is not anti-hermitian (residual {residual:.3e})")));
    }
    Ok(LoopPlan {
        variant: LoopVariant::Explicit,
        x,
        k,
        windings: vec![],
        alphas: vec![],
        nus: vec![],
        s_param: None,
        lambdas: vec![],
        omega: ComplexMatrix::identity(k),
        degenerate_directions: vec![],
    })
}

impl LoopPlan {
    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    /// Upper-left `k × k` block of `X`.
    pub fn generator(&self) -> ComplexMatrix {
        self.x.block(0, 0, self.k, self.k)
    }

    /// Projector onto the first `k` basis states.
    pub fn p0(&self) -> ComplexMatrix {
        let dim = self.dim();
        ComplexMatrix::diag_real(&(0..dim).map(|i| if i < self.k { 1.0 } else { 0.0 }).collect::<Vec<_>>())
    }

    /// Injection of the subspace: the first `k` columns of the identity.
    pub fn injection(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim()).block(0, 0, self.dim(), self.k)
    }

    /// `w = α v_j` of a minimal plan.
    pub fn coupling_vector(&self) -> Vec<C64> {
        match self.variant {
            LoopVariant::Minimal { eigvec } => self.omega.column(eigvec).iter().map(|z| z * self.alphas[0]).collect(),
            _ => panic!("coupling_vector is only defined for minimal plans"),
        }
    }

    /// `e^{tA} = Ω diag(e^{iλt}) Ω†`.
    pub fn exp_ta(&self, t: f64) -> ComplexMatrix {
        let phases: Vec<C64> = self.lambdas.iter().map(|&l| C64::from_polar(1.0, l * t)).collect();
        self.omega.matmul(&ComplexMatrix::diag(&phases)).matmul(&self.omega.adjoint())
    }

    /// `X₀ = [[iΛ, D], [−D, −iΛ]]` of a doubled plan.
    pub fn x0(&self) -> ComplexMatrix {
        let l = ComplexMatrix::diag(&self.lambdas.iter().map(|&l| I * l).collect::<Vec<_>>());
        let d = ComplexMatrix::diag_real(&self.alphas);
        ComplexMatrix::from_blocks(&l, &d, &-&d, &-&l)
    }

    pub fn all_unit_windings(&self) -> bool {
        self.windings.iter().all(|&n| n == 1)
    }
}

/// `X₀` through Pauli algebra: `i(σ_z ⊗ Λ + σ_y ⊗ D)`.
pub fn x0_pauli_form(lambdas: &[f64], alphas: &[f64]) -> ComplexMatrix {
    let l = ComplexMatrix::diag_real(lambdas);
    let d = ComplexMatrix::diag_real(alphas);
    (&pauli::z().kron(&l) + &pauli::y().kron(&d)).scale(I)
}

/// `e^{tX}` in closed form.
pub fn exp_tx(plan: &LoopPlan, t: f64) -> ComplexMatrix {
    match plan.variant {
        LoopVariant::Doubled if plan.all_unit_windings() => doubled_unit_winding(plan, t),
        LoopVariant::Doubled => doubled_general(plan, t),
        LoopVariant::Minimal { .. } => bordered_closed_form(plan, t),
        LoopVariant::Explicit => expm(&plan.x.scale_real(t)).expect("loop operator is square and finite"),
    }
}

/// All `ν_k = π`: `[[cos πt + (A/π) sin πt, (ΩD/π) sin πt], [−(DΩ†/π) sin πt, cos πt − i(Λ/π) sin πt]]`.
fn doubled_unit_winding(plan: &LoopPlan, t: f64) -> ComplexMatrix {
    let k = plan.k;
    let (s, c) = (PI * t).sin_cos();
    let id = ComplexMatrix::identity(k);
    let a = plan.generator();
    let omega_d = plan.x.block(0, k, k, k);
    let upper = &id.scale_real(c) + &a.scale_real(s / PI);
    let right = omega_d.scale_real(s / PI);
    let left = omega_d.adjoint().scale_real(-s / PI);
    let corner = ComplexMatrix::diag(&plan.lambdas.iter().map(|&l| C64::new(c, -l * s / PI)).collect::<Vec<_>>());
    ComplexMatrix::from_blocks(&upper, &right, &left, &corner)
}

/// General windings: `diag(Ω, I) e^{tX₀} diag(Ω†, I)` with
/// `e^{tX₀} = I ⊗ cos νt + i(σ_z ⊗ Λ + σ_y ⊗ D)(I ⊗ sin νt / ν)`.
fn doubled_general(plan: &LoopPlan, t: f64) -> ComplexMatrix {
    let k = plan.k;
    let cos: Vec<f64> = plan.nus.iter().map(|&nu| (nu * t).cos()).collect();
    let sinc: Vec<f64> = plan.nus.iter().map(|&nu| (nu * t).sin() / nu).collect();
    let mut e0 = ComplexMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        let (l, a) = (plan.lambdas[i], plan.alphas[i]);
        e0[(i, i)] = C64::new(cos[i], l * sinc[i]);
        e0[(i, k + i)] = C64::new(a * sinc[i], 0.0);
        e0[(k + i, i)] = C64::new(-a * sinc[i], 0.0);
        e0[(k + i, k + i)] = C64::new(cos[i], -l * sinc[i]);
    }
    let mut frame = ComplexMatrix::identity(2 * k);
    frame.set_block(0, 0, &plan.omega);
    frame.matmul(&e0).matmul(&frame.adjoint())
}

/// `H(t) = e^{tX} P₀ e^{−tX}`.
pub fn hamiltonian_at(plan: &LoopPlan, t: f64) -> ComplexMatrix {
    let f = exp_tx(plan, t).block(0, 0, plan.dim(), plan.k);
    f.matmul(&f.adjoint())
}

/// `‖e^X P₀ e^{−X} − P₀‖_F` with `e^X` from the generic exponential.
pub fn closure_residual(plan: &LoopPlan) -> f64 {
    let e = expm(&plan.x).expect("loop operator is square and finite");
    let p0 = plan.p0();
    (&e.matmul(&p0).matmul(&e.adjoint()) - &p0).frobenius_norm()
}

/// Frobenius norm of the two off-diagonal blocks of `m` in the `(k, dim − k)` split.
pub fn off_diagonal_block_norm(m: &ComplexMatrix, k: usize) -> f64 {
    let n = m.rows();
    let upper = m.block(0, k, k, n - k).frobenius_norm();
    let lower = m.block(k, 0, n - k, k).frobenius_norm();
    upper.hypot(lower)
}
