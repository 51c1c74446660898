use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{ComplexMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(r, n, n);
    (&m + &m.adjoint()).scale_real(0.5)
}

pub fn random_antihermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(r, n, n);
    (&m - &m.adjoint()).scale_real(0.5)
}

/// Haar-ish unitary from Gram–Schmidt on a random matrix; independent of the exponential.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(r, n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = m.column(j);
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let dot: C64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(&qk) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        q.set_column(j, &v);
    }
    q
}

/// Power-series oracle: `terms`-term Taylor sum on `m / 2^s` with `‖m / 2^s‖₁ ≤ 1`, then squared.
pub fn power_series_exp(m: &ComplexMatrix, terms: usize) -> ComplexMatrix {
    let n = m.rows();
    let mut s = 0;
    while m.one_norm() / 2f64.powi(s) > 1.0 {
        s += 1;
    }
    let a = m.scale_real(0.5f64.powi(s));
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..terms {
        term = term.matmul(&a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}
