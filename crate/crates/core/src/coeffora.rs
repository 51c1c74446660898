//! Power-recursion coefficients and their generating functions for the
//! bordered loop operator `X = [[A, w], [−w†, i s]]` with `A w = iλ w`, `w†w = α²`.
//!
//! Powers keep the block shape
//!
//! ```text
//! Xⁿ = [[Aⁿ − bₙ w w†, cₙ w], [(−1)ⁿ cₙ* w†, dₙ]]
//! ```
//!
//! and the exponential inherits it with generating functions `B, C, D` in place of
//! `b, c, d`. This module is the cross-check for the closed forms used in
//! [`crate::loopsynth::exp_tx`]: the series route here only multiplies matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gatelog::GateSpec;
use crate::loopsynth::{plan_minimal, AlphaPolicy, LoopPlan, LoopVariant};
use crate::matcore::{ComplexMatrix, C64, I, ONE, ZERO};

/// Default number of series terms for [`series_exp_tx`].
pub const DEFAULT_SERIES_TERMS: usize = 40;

/// Target accuracy of the quadrature fallback for `B` when `α = 0`.
const QUADRATURE_TOL: f64 = 1e-10;

/// Below this `ν` the `ν → 0` limit of `C` is used.
const NU_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffTriple {
    pub b: Vec<C64>,
    pub c: Vec<C64>,
    pub d: Vec<C64>,
    pub lambda: f64,
    pub alpha: f64,
    pub s: f64,
}

impl CoeffTriple {
    /// Coefficient of `w†` in the lower-left block of `Xⁿ`.
    pub fn lower(&self, n: usize) -> C64 {
        let c = self.c[n].conj();
        if n.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }
}

/// `b, c, d` for `n = 0..=terms`.
///
/// `c` and `d` follow `c_{n+1} = iλ c_n + d_n`, `d_{n+1} = i s d_n − α² c_n`. The `b`
/// line reads off the lower-left block of `Xⁿ`, giving `b_{n+1} = iλ b_n − (−1)ⁿ c_n*`;
/// at `s = −λ` the even `c_n` vanish and the odd ones are real, so this equals
/// `iλ b_n + c_n*`.
pub fn recursion_coeffs(lambda: f64, alpha: f64, s: f64, terms: usize) -> Result<CoeffTriple> {
    if terms < 2 {
        return Err(Error::InvalidArgument(format!("recursion needs at least 2 terms, got {terms}")));
    }
    let il = I * lambda;
    let is = I * s;
    let a2 = alpha * alpha;
    let mut b = vec![ZERO; terms + 1];
    let mut c = vec![ZERO; terms + 1];
    let mut d = vec![ZERO; terms + 1];
    c[1] = ONE;
    d[0] = ONE;
    d[1] = is;
    for n in 1..terms {
        let lower = if n % 2 == 0 { c[n].conj() } else { -c[n].conj() };
        b[n + 1] = il * b[n] - lower;
        c[n + 1] = il * c[n] + d[n];
        d[n + 1] = is * d[n] - c[n] * a2;
    }
    Ok(CoeffTriple { b, c, d, lambda, alpha, s })
}

/// Roots and weights of `C(t) = γ₁ e^{q₁t} + γ₂ e^{q₂t}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClosedFormParams {
    pub q1: C64,
    pub q2: C64,
    pub gamma1: C64,
    pub gamma2: C64,
    pub nu: f64,
}

impl ClosedFormParams {
    pub fn new(lambda: f64, alpha: f64, s: f64) -> Self {
        let nu = 0.5 * ((lambda - s).powi(2) + 4.0 * alpha * alpha).sqrt();
        let mid = 0.5 * (lambda + s);
        let q1 = I * (mid + nu);
        let q2 = I * (mid - nu);
        let (gamma1, gamma2) = if nu > NU_FLOOR {
            let g = ONE / (q1 - q2);
            (g, -g)
        } else {
            (ZERO, ZERO)
        };
        Self { q1, q2, gamma1, gamma2, nu }
    }
}

/// Values of the generating functions at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenFuncs {
    pub b: C64,
    pub c: C64,
    pub d: C64,
    /// `B` came from quadrature because its closed form is singular (`α = 0`).
    pub b_by_quadrature: bool,
}

/// `B(t), C(t), D(t)`.
pub fn gen_funcs(lambda: f64, alpha: f64, s: f64, t: f64) -> GenFuncs {
    let p = ClosedFormParams::new(lambda, alpha, s);
    let c = c_of(lambda, s, p.nu, t);
    let d = c_prime(lambda, s, p.nu, t) - I * lambda * c;

    let (b, b_by_quadrature) = if alpha == 0.0 {
        (b_by_integral(lambda, s, p.nu, t), true)
    } else if (s + lambda).abs() <= 1e-14 * lambda.abs().max(1.0) {
        let nu = p.nu;
        let num = C64::from_polar(1.0, lambda * t) - (nu * t).cos() - I * (lambda / nu) * (nu * t).sin();
        (num / (nu * nu - lambda * lambda), false)
    } else {
        // ∫₀ᵗ e^{iλ(t−τ)} e^{qτ} dτ = (e^{qt} − e^{iλt}) / (q − iλ)
        let il = I * lambda;
        let e_l = (il * t).exp();
        let part = |q: C64| ((q * t).exp() - e_l) / (q - il);
        ((part(p.q1) - part(p.q2)) / (p.q1 - p.q2), false)
    };
    GenFuncs { b, c, d, b_by_quadrature }
}

fn c_of(lambda: f64, s: f64, nu: f64, t: f64) -> C64 {
    let env = C64::from_polar(1.0, 0.5 * (lambda + s) * t);
    if nu > NU_FLOOR {
        env * ((nu * t).sin() / nu)
    } else {
        env * t
    }
}

fn c_prime(lambda: f64, s: f64, nu: f64, t: f64) -> C64 {
    let mid = 0.5 * (lambda + s);
    let env = C64::from_polar(1.0, mid * t);
    if nu > NU_FLOOR {
        env * (I * mid * ((nu * t).sin() / nu) + (nu * t).cos())
    } else {
        env * (I * mid * t + 1.0)
    }
}

/// `B(t) = ∫₀ᵗ e^{iλ(t−τ)} C(τ) dτ` by adaptive Simpson.
fn b_by_integral(lambda: f64, s: f64, nu: f64, t: f64) -> C64 {
    if t == 0.0 {
        return ZERO;
    }
    let f = |tau: f64| C64::from_polar(1.0, lambda * (t - tau)) * c_of(lambda, s, nu, tau);
    adaptive_simpson(&f, 0.0, t, QUADRATURE_TOL)
}

fn adaptive_simpson(f: &impl Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> C64,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
) -> C64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `e^{tX}` for the minimal loop through eigenvector `j` with winding `n`, by both routes.
#[derive(Clone, Debug)]
pub struct RecursionExp {
    /// Block form with the closed-form generating functions.
    pub closed_form: ComplexMatrix,
    /// Truncated power series assembled from the recursion coefficients.
    pub series: ComplexMatrix,
}

impl RecursionExp {
    pub fn discrepancy(&self) -> f64 {
        (&self.closed_form - &self.series).frobenius_norm()
    }
}

pub fn exp_via_recursion(gate: &GateSpec, j: usize, n: u32, t: f64, terms: usize) -> Result<RecursionExp> {
    let plan = plan_minimal(gate, j, n, AlphaPolicy::Keep)?;
    let series = series_exp_tx(gate, j, n, t, terms)?;
    Ok(RecursionExp { closed_form: bordered_closed_form(&plan, t), series })
}

/// `e^{tX}` for a minimal plan from `B, C, D` (the block form with generating functions).
pub(crate) fn bordered_closed_form(plan: &LoopPlan, t: f64) -> ComplexMatrix {
    let LoopVariant::Minimal { eigvec } = plan.variant else {
        panic!("bordered_closed_form needs a minimal plan");
    };
    let lambda = plan.lambdas[eigvec];
    let alpha = plan.alphas[0];
    let s = plan.s_param.expect("minimal plans carry s");
    let g = gen_funcs(lambda, alpha, s, t);
    let w = plan.coupling_vector();
    let wwd = outer(&w, &w);

    let upper = &plan.exp_ta(t) - &wwd.scale(g.b);
    let right = ComplexMatrix::column_vector(&w).scale(g.c);
    let left = ComplexMatrix::column_vector(&w).adjoint().scale(-g.c.conj());
    let corner = ComplexMatrix::diag(&[g.d]);
    ComplexMatrix::from_blocks(&upper, &right, &left, &corner)
}

/// Series route: Σ τᵐ Xᵐ / m! with Xᵐ assembled from the recursion coefficients, at
/// `τ = t / 2ˢ` so that `‖τ X‖₁ < 1`, then squared `s` times.
pub fn series_exp_tx(gate: &GateSpec, j: usize, n: u32, t: f64, terms: usize) -> Result<ComplexMatrix> {
    let plan = plan_minimal(gate, j, n, AlphaPolicy::Keep)?;
    let lambda = gate.lambda[j];
    let s = plan.s_param.expect("minimal plans carry s");
    let coeffs = recursion_coeffs(lambda, plan.alphas[0], s, terms)?;
    let w = plan.coupling_vector();
    let wwd = outer(&w, &w);
    let wcol = ComplexMatrix::column_vector(&w);
    let wrow = wcol.adjoint();
    let a = &gate.a;

    let power = |m: usize, a_pow: &ComplexMatrix| {
        let upper = a_pow - &wwd.scale(coeffs.b[m]);
        let right = wcol.scale(coeffs.c[m]);
        let left = wrow.scale(coeffs.lower(m));
        let corner = ComplexMatrix::diag(&[coeffs.d[m]]);
        ComplexMatrix::from_blocks(&upper, &right, &left, &corner)
    };
    Ok(scaled_series(&plan.x, t, terms, |m, a_pow| power(m, a_pow), a))
}

/// Doubled plan through per-eigenvector recursions: the `k` bordered problems decouple,
/// so `Xᵐ = [[Aᵐ − Σ b_{k,m} w_k w_k†, (c_{k,m} w_k)], [((−1)ᵐ c*_{k,m} w_k†)], diag(d_{k,m})]]`.
pub fn doubled_series_exp(plan: &LoopPlan, t: f64, terms: usize) -> Result<ComplexMatrix> {
    if plan.variant != LoopVariant::Doubled {
        return Err(Error::InvalidArgument("doubled_series_exp needs a doubled plan".into()));
    }
    let k = plan.k;
    let per_k: Vec<CoeffTriple> = (0..k)
        .map(|i| recursion_coeffs(plan.lambdas[i], plan.alphas[i], -plan.lambdas[i], terms))
        .collect::<Result<_>>()?;
    let ws: Vec<Vec<C64>> = (0..k).map(|i| plan.omega.column(i).iter().map(|z| z * plan.alphas[i]).collect()).collect();
    let projectors: Vec<ComplexMatrix> = ws.iter().map(|w| outer(w, w)).collect();
    let a = plan.x.block(0, 0, k, k);

    let power = |m: usize, a_pow: &ComplexMatrix| {
        let mut upper = a_pow.clone();
        let mut right = ComplexMatrix::zeros(k, k);
        let mut left = ComplexMatrix::zeros(k, k);
        let mut corner = ComplexMatrix::zeros(k, k);
        for i in 0..k {
            upper = &upper - &projectors[i].scale(per_k[i].b[m]);
            for r in 0..k {
                right[(r, i)] = ws[i][r] * per_k[i].c[m];
                left[(i, r)] = ws[i][r].conj() * per_k[i].lower(m);
            }
            corner[(i, i)] = per_k[i].d[m];
        }
        ComplexMatrix::from_blocks(&upper, &right, &left, &corner)
    };
    Ok(scaled_series(&plan.x, t, terms, |m, a_pow| power(m, a_pow), &a))
}

fn scaled_series(
    x: &ComplexMatrix,
    t: f64,
    terms: usize,
    power: impl Fn(usize, &ComplexMatrix) -> ComplexMatrix,
    a: &ComplexMatrix,
) -> ComplexMatrix {
    let norm = t.abs() * x.one_norm();
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) >= 1.0 {
        squarings += 1;
    }
    let tau = t / 2f64.powi(squarings);
    let dim = x.rows();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    let mut a_pow = ComplexMatrix::identity(a.rows());
    let mut weight = 1.0;
    for m in 0..=terms {
        sum = &sum + &power(m, &a_pow).scale_real(weight);
        a_pow = a_pow.matmul(a);
        weight *= tau / (m + 1) as f64;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}
