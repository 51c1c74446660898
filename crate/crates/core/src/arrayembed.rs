//! Local loops on an array of `n` main qubits plus one ancilla.
//!
//! The ancilla is tensor factor 0 (most significant bit) and main qubit `q` is
//! factor `q`, for `q = 1..=n`. The degenerate subspace is ancilla `|0⟩`, i.e. the
//! first `2ⁿ` basis states, so "subspace first" and "ancilla first" orderings
//! coincide and a doubled plan's `X` is already the local `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gatelog::{gate_generator, resolve_matrix};
use crate::holocheck::{wilson_holonomy, HolonomyReport};
use crate::loopsynth::{plan_doubled, plan_doubled_from_parts, AlphaPolicy, LoopPlan};
use crate::matcore::{pauli, phase_aligned_distance, ComplexMatrix, I, ZERO};

/// Largest array the dense representation is meant for.
pub const MAX_MAIN_QUBITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayLayout {
    pub n_main: usize,
}

impl ArrayLayout {
    pub fn new(n_main: usize) -> Result<Self> {
        if n_main == 0 || n_main > MAX_MAIN_QUBITS {
            return Err(Error::InvalidArgument(format!("n_main must be in 1..={MAX_MAIN_QUBITS}, got {n_main}")));
        }
        Ok(Self { n_main })
    }

    pub fn dim(&self) -> usize {
        1 << (self.n_main + 1)
    }

    pub fn main_dim(&self) -> usize {
        1 << self.n_main
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n_main {
            return Err(Error::QubitOutOfRange { qubit: q, n_main: self.n_main });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalLoop {
    pub layout: ArrayLayout,
    /// Main-array qubits acted on, in the order the local gate sees them.
    pub targets: Vec<usize>,
    /// Loop operator on `{ancilla, targets…}`.
    pub x_local: ComplexMatrix,
    pub x_full: ComplexMatrix,
    pub h0: ComplexMatrix,
    /// The same loop as a doubled plan on the full array.
    pub plan: LoopPlan,
}

/// `½(I + σ_z) ⊗ I`: projector onto ancilla `|0⟩`.
pub fn h0_array(layout: &ArrayLayout) -> ComplexMatrix {
    let entries: Vec<f64> = (0..layout.dim()).map(|i| if i < layout.main_dim() { 1.0 } else { 0.0 }).collect();
    ComplexMatrix::diag_real(&entries)
}

fn bit(index: usize, factor: usize, n_factors: usize) -> usize {
    (index >> (n_factors - 1 - factor)) & 1
}

/// Index of `index` within the listed factors, the first listed factor most significant.
fn local_index(index: usize, factors: &[usize], n_factors: usize) -> usize {
    factors.iter().fold(0, |acc, &f| (acc << 1) | bit(index, f, n_factors))
}

fn rest_mask(factors: &[usize], n_factors: usize) -> usize {
    let listed: usize = factors.iter().map(|&f| 1 << (n_factors - 1 - f)).sum();
    ((1 << n_factors) - 1) & !listed
}

/// Places `local` on the listed qubit factors of an `n_factors`-qubit register,
/// identity elsewhere. The listed order fixes which factor each local qubit lands on.
pub fn embed_on_factors(local: &ComplexMatrix, factors: &[usize], n_factors: usize) -> Result<ComplexMatrix> {
    let m = factors.len();
    if local.rows() != 1 << m || local.cols() != 1 << m {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", 1 << m),
            found: format!("{}x{}", local.rows(), local.cols()),
        });
    }
    for (i, &f) in factors.iter().enumerate() {
        if f >= n_factors {
            return Err(Error::InvalidArgument(format!("factor {f} out of range for {n_factors} factors")));
        }
        if factors[..i].contains(&f) {
            return Err(Error::DuplicateTarget(f));
        }
    }
    let dim = 1 << n_factors;
    let mask = rest_mask(factors, n_factors);
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        if r & mask == c & mask {
            local[(local_index(r, factors, n_factors), local_index(c, factors, n_factors))]
        } else {
            ZERO
        }
    }))
}

/// Permutation operator exchanging tensor factors `a` and `b`.
pub fn swap_factors(a: usize, b: usize, n_factors: usize) -> ComplexMatrix {
    let dim = 1 << n_factors;
    let (sa, sb) = (n_factors - 1 - a, n_factors - 1 - b);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (ba, bb) = ((i >> sa) & 1, (i >> sb) & 1);
        let j = (i & !(1 << sa) & !(1 << sb)) | (bb << sa) | (ba << sb);
        p[(j, i)] = crate::matcore::ONE;
    }
    p
}

/// Block form `x = [[A, Ω D], [−D Ω†, −i Λ]]` for a one-qubit gate, ancilla first.
///
/// The upper block is the generator with `e^{−A} = u`, so the loop's holonomy is `u`.
pub fn local_x_single(u: &ComplexMatrix, windings: &[u32], policy: AlphaPolicy) -> Result<ComplexMatrix> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: "2x2".into(), found: format!("{}x{}", u.rows(), u.cols()) });
    }
    let gate = gate_generator(&resolve_matrix(u.clone())?)?;
    Ok(plan_doubled(&gate, windings, policy)?.x)
}

/// The same operator assembled from Pauli factors:
/// `½(I+σ_z)⊗A − (i/2)(I−σ_z)⊗Λ + σ₊⊗ΩD − σ₋⊗DΩ†`.
pub fn local_x_single_pauli(u: &ComplexMatrix, windings: &[u32], policy: AlphaPolicy) -> Result<ComplexMatrix> {
    let gate = gate_generator(&resolve_matrix(u.clone())?)?;
    let plan = plan_doubled(&gate, windings, policy)?;
    let id = ComplexMatrix::identity(2);
    let up = (&id + &pauli::z()).scale_real(0.5);
    let down = (&id - &pauli::z()).scale_real(0.5);
    let lambda = ComplexMatrix::diag_real(&plan.lambdas);
    let omega_d = plan.omega.matmul(&ComplexMatrix::diag_real(&plan.alphas));
    Ok(&(&(&up.kron(&gate.a) - &down.kron(&lambda).scale(I)) + &pauli::raising().kron(&omega_d))
        - &pauli::lowering().kron(&omega_d.adjoint()))
}

/// `(iπ/2)[(σ_z − σ_y)⊗I + (σ_y − I)⊗σ_z]`, the closed form quoted in the
/// literature for `u = σ_z`. It is not what the construction produces and is
/// only used for comparison.
pub fn quoted_sigma_z_x() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let a = (&pauli::z() - &pauli::y()).kron(&id);
    let b = (&pauli::y() - &id).kron(&pauli::z());
    (&a + &b).scale(I * (std::f64::consts::PI / 2.0))
}

fn check_targets(layout: &ArrayLayout, targets: &[usize]) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        layout.check_qubit(q)?;
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

fn diag_entries(m: &ComplexMatrix) -> Vec<f64> {
    m.diagonal().iter().map(|z| z.re).collect()
}

fn embed_loop(
    u: &ComplexMatrix,
    targets: &[usize],
    layout: &ArrayLayout,
    windings: &[u32],
    policy: AlphaPolicy,
) -> Result<LocalLoop> {
    check_targets(layout, targets)?;
    let gate = gate_generator(&resolve_matrix(u.clone())?)?;
    let local = plan_doubled(&gate, windings, policy)?;

    let n = layout.n_main;
    let mut factors = vec![0];
    factors.extend_from_slice(targets);
    let x_full = embed_on_factors(&local.x, &factors, n + 1)?;

    // The same loop seen as a doubled plan of the main-array gate.
    let main_factors: Vec<usize> = targets.iter().map(|&q| q - 1).collect();
    let a = embed_on_factors(&gate.a, &main_factors, n)?;
    let omega = embed_on_factors(&local.omega, &main_factors, n)?;
    let lambdas = diag_entries(&embed_on_factors(&ComplexMatrix::diag_real(&local.lambdas), &main_factors, n)?);
    let winding_diag: Vec<f64> = local.windings.iter().map(|&w| w as f64).collect();
    let full_windings: Vec<u32> =
        diag_entries(&embed_on_factors(&ComplexMatrix::diag_real(&winding_diag), &main_factors, n)?)
            .iter()
            .map(|&w| w as u32)
            .collect();
    let plan = plan_doubled_from_parts(&a, &omega, &lambdas, &full_windings, AlphaPolicy::Keep)?;

    Ok(LocalLoop { layout: *layout, targets: targets.to_vec(), x_local: local.x, h0: h0_array(layout), x_full, plan })
}

/// Loop enacting the one-qubit gate `u` on main qubit `k`.
pub fn embed_single(
    u: &ComplexMatrix,
    k: usize,
    layout: &ArrayLayout,
    windings: &[u32],
    policy: AlphaPolicy,
) -> Result<LocalLoop> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: "2x2".into(), found: format!("{}x{}", u.rows(), u.cols()) });
    }
    embed_loop(u, &[k], layout, windings, policy)
}

/// Loop enacting the two-qubit gate `u4` on `(k, l)`; `k` plays the role of the
/// most significant qubit of `u4`.
pub fn embed_two(
    u4: &ComplexMatrix,
    targets: (usize, usize),
    layout: &ArrayLayout,
    windings: &[u32],
    policy: AlphaPolicy,
) -> Result<LocalLoop> {
    if u4.rows() != 4 || u4.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: "4x4".into(), found: format!("{}x{}", u4.rows(), u4.cols()) });
    }
    embed_loop(u4, &[targets.0, targets.1], layout, windings, policy)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalActionReport {
    /// Phase-aligned distance between the Wilson holonomy and the embedded gate.
    pub residual: f64,
    /// Largest `‖[W, σ]‖_F` over `σ ∈ {σ_x, σ_z}` on each spectator qubit.
    pub spectator_residual: f64,
    /// Frobenius norm of the off-diagonal ancilla blocks of `e^{X_full}`.
    pub ancilla_return: f64,
    pub holonomy: HolonomyReport,
}

/// Expected gate on the main array: `expected_local` on the targets, identity elsewhere.
pub fn embedded_gate(lp: &LocalLoop, expected_local: &ComplexMatrix) -> Result<ComplexMatrix> {
    let main_factors: Vec<usize> = lp.targets.iter().map(|&q| q - 1).collect();
    embed_on_factors(expected_local, &main_factors, lp.layout.n_main)
}

pub fn verify_local_action(lp: &LocalLoop, expected_local: &ComplexMatrix, steps: usize) -> Result<LocalActionReport> {
    let expected = embedded_gate(lp, expected_local)?;
    let holonomy = wilson_holonomy(&lp.plan, steps)?;
    let w = &holonomy.wilson_holonomy;
    let n = lp.layout.n_main;
    let mut spectator_residual: f64 = 0.0;
    for q in (1..=n).filter(|q| !lp.targets.contains(q)) {
        for sigma in [pauli::x(), pauli::z()] {
            let s = embed_on_factors(&sigma, &[q - 1], n)?;
            spectator_residual = spectator_residual.max(w.commutator(&s).frobenius_norm());
        }
    }
    let e = crate::matcore::expm(&lp.x_full)?;
    Ok(LocalActionReport {
        residual: phase_aligned_distance(w, &expected),
        spectator_residual,
        ancilla_return: crate::loopsynth::off_diagonal_block_norm(&e, lp.layout.main_dim()),
        holonomy,
    })
}
