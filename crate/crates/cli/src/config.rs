//! Job configuration: the JSON schema, its defaults and their resolution.

use std::path::PathBuf;

use hololoop::gatelog::GateSource;
use serde::{Deserialize, Serialize};

pub const DEFAULT_GATE: &str = "pauli_z";
pub const DEFAULT_WINDING: u32 = 1;
pub const DEFAULT_WILSON_STEPS: usize = 4096;
pub const DEFAULT_T_LIST: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
pub const DEFAULT_SAMPLE_GRID: usize = 101;
/// Recursion coefficients `n = 0..=terms`.
pub const DEFAULT_COEFF_TERMS: usize = 12;
pub const DEFAULT_TOL_CLOSURE: f64 = 1e-9;
pub const DEFAULT_TOL_WILSON_ONE_QUBIT: f64 = 2e-3;
pub const DEFAULT_TOL_WILSON_TWO_QUBIT: f64 = 5e-3;
pub const DEFAULT_MIN_FIDELITY: f64 = 0.97;
pub const DEFAULT_MAX_LEAKAGE: f64 = 0.03;
pub const DEFAULT_TOL_SPECTATOR: f64 = 1e-6;
pub const DEFAULT_TOL_ANCILLA: f64 = 1e-9;
pub const DEFAULT_TOL_RECURSION: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Synth,
    Verify,
    Simulate,
    Embed,
    Coeffs,
    Report,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Minimal,
    #[default]
    Doubled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    pub n_main: Option<usize>,
    #[serde(default)]
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub closure: f64,
    /// Defaults by gate size: one-qubit vs two-qubit.
    pub wilson: Option<f64>,
    pub min_fidelity: f64,
    pub max_leakage: f64,
    pub spectator: f64,
    pub ancilla: f64,
    pub recursion: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            closure: DEFAULT_TOL_CLOSURE,
            wilson: None,
            min_fidelity: DEFAULT_MIN_FIDELITY,
            max_leakage: DEFAULT_MAX_LEAKAGE,
            spectator: DEFAULT_TOL_SPECTATOR,
            ancilla: DEFAULT_TOL_ANCILLA,
            recursion: DEFAULT_TOL_RECURSION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub wilson_steps: Vec<usize>,
    #[serde(rename = "T_list")]
    pub t_list: Vec<f64>,
    /// Integration steps per run; `None` means the simulator's default for each `T`.
    pub sim_steps: Option<usize>,
    pub sample_grid: usize,
    pub coeff_terms: usize,
    pub tolerances: ToleranceConfig,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            wilson_steps: vec![DEFAULT_WILSON_STEPS],
            t_list: DEFAULT_T_LIST.to_vec(),
            sim_steps: None,
            sample_grid: DEFAULT_SAMPLE_GRID,
            coeff_terms: DEFAULT_COEFF_TERMS,
            tolerances: ToleranceConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// May be omitted when the command is given on the command line.
    #[serde(default)]
    pub command: Option<CommandKind>,
    #[serde(default = "default_gate")]
    pub gate: GateSource,
    #[serde(default)]
    pub variant: VariantKind,
    /// One per component; all `DEFAULT_WINDING` when absent.
    #[serde(default)]
    pub windings: Option<Vec<u32>>,
    /// Eigenvector of the minimal variant; the one with the largest amplitude when absent.
    #[serde(default)]
    pub eigvec_index: Option<usize>,
    #[serde(default)]
    pub strict_alpha: bool,
    #[serde(default)]
    pub layout: Option<LayoutConfig>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_gate() -> GateSource {
    GateSource::Named(DEFAULT_GATE.to_string())
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            command: None,
            gate: default_gate(),
            variant: VariantKind::default(),
            windings: None,
            eigvec_index: None,
            strict_alpha: false,
            layout: None,
            numeric: NumericConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid job config: {e}"))
    }

    /// Structural checks that do not need the gate.
    pub fn validate(&self) -> Result<(), String> {
        let n = &self.numeric;
        if n.wilson_steps.is_empty() {
            return Err("numeric.wilson_steps must not be empty".into());
        }
        if n.t_list.is_empty() {
            return Err("numeric.T_list must not be empty".into());
        }
        if n.t_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err("numeric.T_list entries must be positive".into());
        }
        if n.sample_grid < 2 {
            return Err("numeric.sample_grid must be at least 2".into());
        }
        if n.coeff_terms < 2 {
            return Err("numeric.coeff_terms must be at least 2".into());
        }
        let t = &n.tolerances;
        for (name, v) in [
            ("closure", Some(t.closure)),
            ("wilson", t.wilson),
            ("max_leakage", Some(t.max_leakage)),
            ("spectator", Some(t.spectator)),
            ("ancilla", Some(t.ancilla)),
            ("recursion", Some(t.recursion)),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(format!("tolerance {name} must be a non-negative number"));
                }
            }
        }
        if !(0.0..=1.0).contains(&t.min_fidelity) {
            return Err("tolerances.min_fidelity must lie in [0, 1]".into());
        }
        if let Some(w) = &self.windings {
            if w.contains(&0) {
                return Err("windings must be positive".into());
            }
        }
        Ok(())
    }
}
