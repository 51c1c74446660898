//! CSV export of `H(t)` sampled along a loop.
//!
//! Line 1 is `# dim=<dim>,k=<k>`, line 2 the column names, then one row per
//! sample: `t` followed by the real and imaginary part of every entry of
//! `H(t)` in row-major order. Numbers are written in shortest round-trip form,
//! so reading them back is exact.

use std::io::{BufRead, Write};

use anyhow::{anyhow, bail, Context, Result};
use hololoop::loopsynth::{hamiltonian_at, LoopPlan};
use hololoop::matcore::{ComplexMatrix, C64};

pub struct LoopSamples {
    pub dim: usize,
    pub k: usize,
    pub samples: Vec<(f64, ComplexMatrix)>,
}

/// Shortest round-trip text for `x`, in exponent form when plain digits would be long.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn export_loop_samples(plan: &LoopPlan, grid: usize, out: &mut impl Write) -> Result<()> {
    if grid < 2 {
        bail!("sample grid must have at least 2 points, got {grid}");
    }
    let dim = plan.dim();
    writeln!(out, "# dim={dim},k={}", plan.k)?;
    let mut header = vec!["t".to_string()];
    for r in 0..dim {
        for c in 0..dim {
            header.push(format!("h_{r}_{c}_re"));
            header.push(format!("h_{r}_{c}_im"));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for i in 0..grid {
        let t = i as f64 / (grid - 1) as f64;
        let h = hamiltonian_at(plan, t);
        let mut row = vec![format_f64(t)];
        for z in h.as_slice() {
            row.push(format_f64(z.re));
            row.push(format_f64(z.im));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_loop_samples(input: impl BufRead) -> Result<LoopSamples> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| anyhow!("empty sample file"))??;
    let meta = first.strip_prefix("# ").ok_or_else(|| anyhow!("missing `# dim=..,k=..` line"))?;
    let mut dim = None;
    let mut k = None;
    for part in meta.split(',') {
        match part.split_once('=') {
            Some(("dim", v)) => dim = Some(v.parse::<usize>()?),
            Some(("k", v)) => k = Some(v.parse::<usize>()?),
            _ => bail!("unexpected header field `{part}`"),
        }
    }
    let (dim, k) = (dim.context("header lacks dim")?, k.context("header lacks k")?);
    lines.next().ok_or_else(|| anyhow!("missing column header"))??;

    let mut samples = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("row {}", n + 1))?;
        if values.len() != 1 + 2 * dim * dim {
            bail!("row {} has {} values, expected {}", n + 1, values.len(), 1 + 2 * dim * dim);
        }
        let data = values[1..].chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        samples.push((values[0], ComplexMatrix::from_vec(dim, dim, data)?));
    }
    Ok(LoopSamples { dim, k, samples })
}
