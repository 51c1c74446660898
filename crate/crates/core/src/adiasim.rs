//! Time-dependent Schrödinger integration along a loop: `i dψ/dτ = H(τ/T) ψ`.
//!
//! `H(t)` is always a rank-`k` projector (it is conjugate to `P₀`), so the
//! midpoint step `expm(−iΔτ H)` is applied exactly as `I + (e^{−iΔτ} − 1) H`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holocheck::{align_phase, connection_of, frame_at};
use crate::loopsynth::LoopPlan;
use crate::matcore::{expm, phase_aligned_distance, ComplexMatrix, C64};

/// Resolution guard: at least this many steps per unit of `T`.
pub const MIN_STEPS_PER_UNIT_TIME: f64 = 100.0;
/// Default resolution used by the sweeps and the CLI.
pub const DEFAULT_STEPS_PER_UNIT_TIME: f64 = 200.0;

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdiabaticRun {
    #[serde(rename = "T")]
    pub total_time: f64,
    pub steps: usize,
    /// `(1/k) Σ_j |⟨U e_j, R e_j⟩|`
    pub fidelity: f64,
    /// `max_j (1 − ‖P₀ ψ_j(T)‖²)`
    pub leakage: f64,
    /// Projected gate with `e^{−iT}` removed, phase-aligned to the target.
    pub realized_gate: ComplexMatrix,
    /// Phase-aligned Frobenius distance of the realized gate to the target.
    pub gate_distance: f64,
    /// `max_j |‖ψ_j(T)‖ − 1|`
    pub norm_drift: f64,
    /// `|⟨U e_j, R e_j⟩|` for each basis state.
    pub column_fidelity: Vec<f64>,
    /// `1 − ‖P₀ ψ_j(T)‖²` for each basis state.
    pub column_leakage: Vec<f64>,
    /// Largest population outside the instantaneous eigenspace met along the loop.
    pub peak_leakage: f64,
}

/// Smallest step count accepted for total time `total_time`.
pub fn required_steps(total_time: f64) -> usize {
    ((MIN_STEPS_PER_UNIT_TIME * total_time).ceil() as usize).max(1)
}

pub fn default_steps(total_time: f64) -> usize {
    ((DEFAULT_STEPS_PER_UNIT_TIME * total_time).ceil() as usize).max(required_steps(total_time))
}

fn check_resolution(total_time: f64, steps: usize) -> Result<()> {
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(Error::InvalidArgument(format!("total time must be positive, got {total_time}")));
    }
    let required = required_steps(total_time);
    if steps < required {
        return Err(Error::ResolutionTooLow { steps, total_time, required });
    }
    Ok(())
}

/// Evolves every column of `psi` (dim × m). After each step `observe(t, ψ, pop)` is
/// called, where `pop[j] = ‖F(t_mid)† ψ_j‖²` is the population of column `j` in the
/// eigenspace at the step midpoint.
pub fn evolve_columns_observed(
    plan: &LoopPlan,
    total_time: f64,
    steps: usize,
    psi: &ComplexMatrix,
    mut observe: impl FnMut(f64, &ComplexMatrix, &[f64]),
) -> Result<ComplexMatrix> {
    check_resolution(total_time, steps)?;
    if psi.rows() != plan.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", plan.dim()),
            found: format!("{} rows", psi.rows()),
        });
    }
    let dtau = total_time / steps as f64;
    let kick = C64::from_polar(1.0, -dtau) - 1.0;
    let mut psi = psi.clone();
    for m in 0..steps {
        let f = frame_at(plan, (m as f64 + 0.5) / steps as f64);
        let overlap = f.adjoint().matmul(&psi);
        psi = &psi + &f.matmul(&overlap).scale(kick);
        let pop: Vec<f64> =
            (0..overlap.cols()).map(|j| (0..overlap.rows()).map(|i| overlap[(i, j)].norm_sqr()).sum()).collect();
        observe((m + 1) as f64 / steps as f64, &psi, &pop);
    }
    Ok(psi)
}

pub fn evolve_columns(plan: &LoopPlan, total_time: f64, steps: usize, psi: &ComplexMatrix) -> Result<ComplexMatrix> {
    evolve_columns_observed(plan, total_time, steps, psi, |_, _, _| {})
}

pub fn evolve(plan: &LoopPlan, total_time: f64, steps: usize, psi0: &[C64]) -> Result<Vec<C64>> {
    let norm = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!("initial state must be normalized, norm is {norm}")));
    }
    Ok(evolve_columns(plan, total_time, steps, &ComplexMatrix::column_vector(psi0))?.column(0))
}

/// Runs the loop on each subspace basis state and compares the result to `e^{−A}`.
pub fn realized_gate(plan: &LoopPlan, total_time: f64, steps: usize) -> Result<AdiabaticRun> {
    let k = plan.k;
    let target = expm(&-&connection_of(plan))?;
    let mut peak_leakage: f64 = 0.0;
    let psi = evolve_columns_observed(plan, total_time, steps, &plan.injection(), |_, _, pop| {
        for p in pop {
            peak_leakage = peak_leakage.max(1.0 - p);
        }
    })?;

    let mut column_leakage = Vec::with_capacity(k);
    let mut norm_drift: f64 = 0.0;
    for j in 0..k {
        let col = psi.column(j);
        let total: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        let inside: f64 = col[..k].iter().map(|z| z.norm_sqr()).sum();
        column_leakage.push((1.0 - inside).max(0.0));
        norm_drift = norm_drift.max((total.sqrt() - 1.0).abs());
    }
    let dynamical = C64::from_polar(1.0, total_time);
    let projected = psi.block(0, 0, k, k).scale(dynamical);
    let realized = align_phase(&projected, &target);
    let column_fidelity: Vec<f64> = (0..k)
        .map(|j| target.column(j).iter().zip(realized.column(j)).map(|(u, r)| u.conj() * r).sum::<C64>().norm())
        .collect();
    Ok(AdiabaticRun {
        total_time,
        steps,
        fidelity: column_fidelity.iter().sum::<f64>() / k as f64,
        leakage: column_leakage.iter().cloned().fold(0.0, f64::max),
        gate_distance: phase_aligned_distance(&realized, &target),
        realized_gate: realized,
        norm_drift,
        column_fidelity,
        column_leakage,
        peak_leakage: peak_leakage.max(0.0),
    })
}

/// [`realized_gate`] at each time in `times` with [`default_steps`], in parallel.
pub fn sweep(plan: &LoopPlan, times: &[f64]) -> Result<Vec<AdiabaticRun>> {
    times.par_iter().map(|&t| realized_gate(plan, t, default_steps(t))).collect()
}
