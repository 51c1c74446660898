//! Command-line flags and how they override a JSON job file.

use std::path::PathBuf;

use clap::Parser;
use hololoop::gatelog::GateSource;
use hololoop::matcore::ComplexMatrix;

use crate::config::{CommandKind, Format, JobConfig, LayoutConfig, VariantKind};

#[derive(Debug, Parser)]
#[command(name = "hololoop", version, about = "Holonomic gates from closed isospectral loops")]
pub struct Cli {
    /// What to run; may instead come from the job file.
    #[arg(value_enum)]
    pub command: Option<CommandKind>,

    /// JSON job file; flags given on the command line override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Named gate (identity, pauli_x, pauli_y, pauli_z, hadamard, phase_s, t_gate, cnot, cz, swap, qft2).
    #[arg(long, conflicts_with = "matrix_file")]
    pub gate: Option<String>,

    /// JSON file holding a unitary as rows of {"re", "im"} entries.
    #[arg(long)]
    pub matrix_file: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub variant: Option<VariantKind>,

    /// Comma-separated winding numbers.
    #[arg(long, value_delimiter = ',')]
    pub windings: Option<Vec<u32>>,

    /// Eigenvector index for the minimal variant and coefficient dumps.
    #[arg(long)]
    pub eigvec: Option<usize>,

    #[arg(long)]
    pub n_main: Option<usize>,

    /// Comma-separated main-array qubits, numbered from 1.
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<usize>>,

    /// Comma-separated Wilson-line step counts.
    #[arg(long, value_delimiter = ',')]
    pub wilson_steps: Option<Vec<usize>>,

    /// Comma-separated total evolution times.
    #[arg(long = "T", value_delimiter = ',')]
    pub total_times: Option<Vec<f64>>,

    /// Integration steps per simulation run.
    #[arg(long)]
    pub sim_steps: Option<usize>,

    /// Samples along the loop for `synth --format csv`.
    #[arg(long)]
    pub grid: Option<usize>,

    /// Highest recursion order for `coeffs`.
    #[arg(long)]
    pub terms: Option<usize>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Raise the winding of any component whose amplitude would vanish.
    #[arg(long)]
    pub strict_alpha: bool,

    #[arg(long)]
    pub tol_closure: Option<f64>,

    #[arg(long)]
    pub tol_wilson: Option<f64>,
}

impl Cli {
    pub fn job_config(&self) -> Result<JobConfig, String> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                JobConfig::from_json(&text)?
            }
            None => JobConfig::default(),
        };
        if let Some(cmd) = self.command {
            c.command = Some(cmd);
        }
        if c.command.is_none() {
            return Err("no command given (pass one or set `command` in the job file)".into());
        }
        if let Some(name) = &self.gate {
            c.gate = GateSource::Named(name.clone());
        }
        if let Some(path) = &self.matrix_file {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let m: ComplexMatrix =
                serde_json::from_str(&text).map_err(|e| format!("invalid matrix in {}: {e}", path.display()))?;
            c.gate = GateSource::Matrix(m);
        }
        if let Some(v) = self.variant {
            c.variant = v;
        }
        if let Some(w) = &self.windings {
            c.windings = Some(w.clone());
        }
        if let Some(j) = self.eigvec {
            c.eigvec_index = Some(j);
        }
        if self.n_main.is_some() || self.targets.is_some() {
            let layout = c.layout.get_or_insert(LayoutConfig { n_main: None, targets: vec![] });
            if let Some(n) = self.n_main {
                layout.n_main = Some(n);
            }
            if let Some(t) = &self.targets {
                layout.targets = t.clone();
            }
        }
        if let Some(n) = &self.wilson_steps {
            c.numeric.wilson_steps = n.clone();
        }
        if let Some(t) = &self.total_times {
            c.numeric.t_list = t.clone();
        }
        if let Some(s) = self.sim_steps {
            c.numeric.sim_steps = Some(s);
        }
        if let Some(g) = self.grid {
            c.numeric.sample_grid = g;
        }
        if let Some(t) = self.terms {
            c.numeric.coeff_terms = t;
        }
        if let Some(p) = &self.out {
            c.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            c.output.format = f;
        }
        if self.strict_alpha {
            c.strict_alpha = true;
        }
        if let Some(t) = self.tol_closure {
            c.numeric.tolerances.closure = t;
        }
        if let Some(t) = self.tol_wilson {
            c.numeric.tolerances.wilson = Some(t);
        }
        Ok(c)
    }
}
