//! Executes a resolved job and assembles its report.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use hololoop::adiasim::{default_steps, realized_gate};
use hololoop::arrayembed::{embed_single, embed_two, verify_local_action, ArrayLayout};
use hololoop::coeffora::{exp_via_recursion, recursion_coeffs, DEFAULT_SERIES_TERMS};
use hololoop::gatelog::{gate_generator, resolve, GateSpec};
use hololoop::holocheck::wilson_holonomy;
use hololoop::loopsynth::{closure_residual, plan_doubled, plan_minimal, AlphaPolicy, LoopPlan, LoopVariant};
use hololoop::matcore::{ComplexMatrix, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    CommandKind, Format, JobConfig, LayoutConfig, VariantKind, DEFAULT_TOL_WILSON_ONE_QUBIT,
    DEFAULT_TOL_WILSON_TWO_QUBIT, DEFAULT_WINDING,
};
use crate::samples::{export_loop_samples, format_f64};

/// Why a job stopped before producing a verdict.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 1.
    Validation(String),
    /// The numerical kernel gave up: exit code 3.
    Numerical(String),
}

impl From<hololoop::Error> for Failure {
    fn from(e: hololoop::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Validation(format!("{e:#}"))
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Upper bound, or lower bound when `lower_bound` is set.
    pub tolerance: f64,
    pub lower_bound: bool,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct GateInfo {
    pub name: Option<String>,
    pub dim: usize,
    pub u: ComplexMatrix,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Component {
    pub index: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub nu: f64,
    pub winding: u32,
}

#[derive(Debug, Serialize)]
pub struct PlanSummary {
    pub variant: LoopVariant,
    pub dim: usize,
    pub k: usize,
    pub components: Vec<Component>,
    pub degenerate_directions: Vec<usize>,
    pub closure_residual: f64,
    pub x: ComplexMatrix,
}

#[derive(Debug, Serialize)]
pub struct WilsonEntry {
    pub steps: usize,
    pub target_distance: f64,
    pub raw_product_distance: f64,
    pub wilson_holonomy: ComplexMatrix,
}

#[derive(Debug, Serialize)]
pub struct VerifySection {
    pub connection: ComplexMatrix,
    pub isospectral_residual: f64,
    pub frame_return_deviation: f64,
    pub wilson: Vec<WilsonEntry>,
}

#[derive(Debug, Serialize)]
pub struct SimEntry {
    #[serde(rename = "T")]
    pub total_time: f64,
    pub steps: usize,
    pub fidelity: f64,
    pub leakage: f64,
    pub peak_leakage: f64,
    pub gate_distance: f64,
}

#[derive(Debug, Serialize)]
pub struct EmbedEntry {
    pub steps: usize,
    pub residual: f64,
    pub spectator_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct EmbedSection {
    pub n_main: usize,
    pub targets: Vec<usize>,
    pub dim: usize,
    pub x_local: ComplexMatrix,
    pub closure_residual: f64,
    pub ancilla_return: f64,
    pub runs: Vec<EmbedEntry>,
}

#[derive(Debug, Serialize)]
pub struct CoeffRow {
    pub n: usize,
    pub b: C64Json,
    pub c: C64Json,
    pub d: C64Json,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct C64Json {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for C64Json {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct CoeffCheck {
    pub t: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Serialize)]
pub struct CoeffSection {
    pub eigvec: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub s: f64,
    pub coefficients: Vec<CoeffRow>,
    pub series_terms: usize,
    pub exp_checks: Vec<CoeffCheck>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub timestamp_unix: u64,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub command: CommandKind,
    pub config: JobConfig,
    pub gate: GateInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<Vec<SimEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embed: Option<EmbedSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<CoeffSection>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// The only field that varies between identical runs.
    pub timing: Timing,
}

pub struct Outcome {
    pub report: Report,
    /// Table form of the command's main result.
    pub csv: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.report)
                .map(|s| s + "\n")
                .map_err(|e| Failure::Validation(e.to_string())),
            Format::Csv => Ok(self.csv.clone()),
        }
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let passed = value <= tolerance;
        self.0.push(Check { name: name.into(), value, tolerance, lower_bound: false, passed });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let passed = value >= tolerance;
        self.0.push(Check { name: name.into(), value, tolerance, lower_bound: true, passed });
    }
}

fn policy(config: &JobConfig) -> AlphaPolicy {
    if config.strict_alpha {
        AlphaPolicy::Strict
    } else {
        AlphaPolicy::Keep
    }
}

/// Eigenvector with the largest loop amplitude at unit winding, i.e. `|λ|` smallest.
fn default_eigvec(gate: &GateSpec) -> usize {
    let mut best = 0;
    for (j, l) in gate.lambda.iter().enumerate() {
        if l.abs() < gate.lambda[best].abs() {
            best = j;
        }
    }
    best
}

/// Fills every default that depends on the gate, so the echoed config is complete.
fn resolve_defaults(config: &mut JobConfig, command: CommandKind, gate: &GateSpec) {
    config.command = Some(command);
    let k = gate.dim();
    if config.windings.is_none() {
        let count = match (command, config.variant) {
            (CommandKind::Embed, _) => k,
            (_, VariantKind::Minimal) => 1,
            (_, VariantKind::Doubled) => k,
        };
        config.windings = Some(vec![DEFAULT_WINDING; count]);
    }
    if config.eigvec_index.is_none() && (config.variant == VariantKind::Minimal || command == CommandKind::Coeffs) {
        config.eigvec_index = Some(default_eigvec(gate));
    }
    if config.numeric.tolerances.wilson.is_none() {
        config.numeric.tolerances.wilson =
            Some(if k <= 2 { DEFAULT_TOL_WILSON_ONE_QUBIT } else { DEFAULT_TOL_WILSON_TWO_QUBIT });
    }
    if command == CommandKind::Embed {
        let qubits = k.trailing_zeros() as usize;
        let layout = config.layout.get_or_insert(LayoutConfig { n_main: None, targets: vec![] });
        if layout.targets.is_empty() {
            layout.targets = (1..=qubits).collect();
        }
        if layout.n_main.is_none() {
            layout.n_main = Some(layout.targets.iter().copied().max().unwrap_or(qubits).max(qubits));
        }
    }
}

fn build_plan(config: &JobConfig, gate: &GateSpec) -> Result<LoopPlan, Failure> {
    let windings = config.windings.as_deref().unwrap_or_default();
    match config.variant {
        VariantKind::Doubled => Ok(plan_doubled(gate, windings, policy(config))?),
        VariantKind::Minimal => {
            if windings.len() != 1 {
                return Err(Failure::Validation(format!(
                    "the minimal variant takes exactly one winding, got {}",
                    windings.len()
                )));
            }
            let j = config.eigvec_index.unwrap_or(0);
            Ok(plan_minimal(gate, j, windings[0], policy(config))?)
        }
    }
}

fn summarize(plan: &LoopPlan) -> PlanSummary {
    let components = match plan.variant {
        LoopVariant::Minimal { eigvec } => vec![Component {
            index: eigvec,
            lambda: plan.lambdas[eigvec],
            alpha: plan.alphas[0],
            nu: plan.nus[0],
            winding: plan.windings[0],
        }],
        _ => (0..plan.alphas.len())
            .map(|i| Component {
                index: i,
                lambda: plan.lambdas[i],
                alpha: plan.alphas[i],
                nu: plan.nus[i],
                winding: plan.windings[i],
            })
            .collect(),
    };
    PlanSummary {
        variant: plan.variant,
        dim: plan.dim(),
        k: plan.k,
        components,
        degenerate_directions: plan.degenerate_directions.clone(),
        closure_residual: closure_residual(plan),
        x: plan.x.clone(),
    }
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn run(mut config: JobConfig) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let command = config.command.ok_or_else(|| Failure::Validation("no command given".into()))?;
    config.validate().map_err(Failure::Validation)?;
    let u = resolve(&config.gate)?;
    let mut gate = gate_generator(&u)?;
    if let hololoop::gatelog::GateSource::Named(name) = &config.gate {
        gate.name = Some(name.clone());
    }
    resolve_defaults(&mut config, command, &gate);

    let tol = config.numeric.tolerances.clone();
    let tol_wilson = tol.wilson.unwrap_or(DEFAULT_TOL_WILSON_TWO_QUBIT);
    let mut checks = Checks(Vec::new());
    let mut report = Report {
        tool: ToolInfo { name: "hololoop", version: env!("CARGO_PKG_VERSION") },
        command,
        config: config.clone(),
        gate: GateInfo { name: gate.name.clone(), dim: gate.dim(), u: gate.u.clone(), lambda: gate.lambda.clone() },
        plan: None,
        verify: None,
        simulate: None,
        embed: None,
        coeffs: None,
        checks: vec![],
        passed: false,
        timing: Timing { timestamp_unix: 0, wall_clock_seconds: 0.0 },
    };
    let mut csv = String::new();

    let needs_plan =
        matches!(command, CommandKind::Synth | CommandKind::Verify | CommandKind::Simulate | CommandKind::Report);
    let plan = if needs_plan { Some(build_plan(&config, &gate)?) } else { None };

    if let Some(plan) = &plan {
        let summary = summarize(plan);
        checks.at_most("closure_residual", summary.closure_residual, tol.closure);
        report.plan = Some(summary);
        if command == CommandKind::Synth {
            let mut buf = Vec::new();
            export_loop_samples(plan, config.numeric.sample_grid, &mut buf)?;
            csv = String::from_utf8(buf).map_err(|e| Failure::Validation(e.to_string()))?;
        }
    }

    if matches!(command, CommandKind::Verify | CommandKind::Report) {
        let plan = plan.as_ref().expect("plan built for verify");
        let reports =
            config.numeric.wilson_steps.par_iter().map(|&n| wilson_holonomy(plan, n)).collect::<Result<Vec<_>, _>>()?;
        let first = &reports[0];
        let mut rows = Vec::new();
        for r in &reports {
            checks.at_most(format!("wilson_target_distance[N={}]", r.wilson_steps), r.target_distance, tol_wilson);
            rows.push(vec![
                r.wilson_steps.to_string(),
                format_f64(r.target_distance),
                format_f64(r.raw_product_distance),
            ]);
        }
        report.verify = Some(VerifySection {
            connection: first.connection.clone(),
            isospectral_residual: first.isospectral_residual,
            frame_return_deviation: first.frame_return_deviation,
            wilson: reports
                .iter()
                .map(|r| WilsonEntry {
                    steps: r.wilson_steps,
                    target_distance: r.target_distance,
                    raw_product_distance: r.raw_product_distance,
                    wilson_holonomy: r.wilson_holonomy.clone(),
                })
                .collect(),
        });
        if command == CommandKind::Verify {
            csv = csv_table("N,target_distance,raw_product_distance", rows);
        }
    }

    if matches!(command, CommandKind::Simulate | CommandKind::Report) {
        let plan = plan.as_ref().expect("plan built for simulate");
        let runs = config
            .numeric
            .t_list
            .par_iter()
            .map(|&t| realized_gate(plan, t, config.numeric.sim_steps.unwrap_or_else(|| default_steps(t))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for r in &runs {
            checks.at_least(format!("fidelity[T={}]", r.total_time), r.fidelity, tol.min_fidelity);
            checks.at_most(format!("leakage[T={}]", r.total_time), r.leakage, tol.max_leakage);
            rows.push(vec![format_f64(r.total_time), format_f64(r.fidelity), format_f64(r.leakage)]);
            entries.push(SimEntry {
                total_time: r.total_time,
                steps: r.steps,
                fidelity: r.fidelity,
                leakage: r.leakage,
                peak_leakage: r.peak_leakage,
                gate_distance: r.gate_distance,
            });
        }
        report.simulate = Some(entries);
        if command == CommandKind::Simulate {
            csv = csv_table("T,fidelity,leakage", rows);
        }
    }

    if command == CommandKind::Embed {
        let layout_cfg = config.layout.clone().expect("layout resolved for embed");
        let layout = ArrayLayout::new(layout_cfg.n_main.expect("n_main resolved"))?;
        let windings = config.windings.clone().unwrap_or_default();
        let targets = layout_cfg.targets.clone();
        let lp = match (gate.dim(), targets.as_slice()) {
            (2, [k]) => embed_single(&gate.u, *k, &layout, &windings, policy(&config))?,
            (4, [k, l]) => embed_two(&gate.u, (*k, *l), &layout, &windings, policy(&config))?,
            (d, t) => {
                return Err(Failure::Validation(format!(
                    "a {d}x{d} gate needs {} target(s), got {}",
                    d.trailing_zeros(),
                    t.len()
                )))
            }
        };
        let closure = closure_residual(&lp.plan);
        checks.at_most("closure_residual", closure, tol.closure);
        let actions = config
            .numeric
            .wilson_steps
            .par_iter()
            .map(|&n| verify_local_action(&lp, &gate.u, n))
            .collect::<Result<Vec<_>, _>>()?;
        let ancilla_return = actions[0].ancilla_return;
        checks.at_most("ancilla_return", ancilla_return, tol.ancilla);
        let mut rows = Vec::new();
        let mut runs = Vec::new();
        for (a, &n) in actions.iter().zip(&config.numeric.wilson_steps) {
            checks.at_most(format!("local_residual[N={n}]"), a.residual, tol_wilson);
            checks.at_most(format!("spectator_residual[N={n}]"), a.spectator_residual, tol.spectator);
            rows.push(vec![n.to_string(), format_f64(a.residual), format_f64(a.spectator_residual)]);
            runs.push(EmbedEntry { steps: n, residual: a.residual, spectator_residual: a.spectator_residual });
        }
        report.embed = Some(EmbedSection {
            n_main: layout.n_main,
            targets,
            dim: layout.dim(),
            x_local: lp.x_local.clone(),
            closure_residual: closure,
            ancilla_return,
            runs,
        });
        csv = csv_table("N,residual,spectator_residual", rows);
    }

    if command == CommandKind::Coeffs {
        let j = config.eigvec_index.expect("eigvec resolved for coeffs");
        let windings = config.windings.clone().unwrap_or_default();
        let winding = windings.first().copied().unwrap_or(DEFAULT_WINDING);
        let plan = plan_minimal(&gate, j, winding, policy(&config))?;
        let (lambda, alpha) = (gate.lambda[j], plan.alphas[0]);
        let s = plan.s_param.expect("minimal plan carries s");
        let triple = recursion_coeffs(lambda, alpha, s, config.numeric.coeff_terms)?;
        let coefficients: Vec<CoeffRow> = (0..triple.b.len())
            .map(|n| CoeffRow { n, b: triple.b[n].into(), c: triple.c[n].into(), d: triple.d[n].into() })
            .collect();
        let mut exp_checks = Vec::new();
        for t in [0.25, 0.5, 0.75, 1.0] {
            let r = exp_via_recursion(&gate, j, plan.windings[0], t, DEFAULT_SERIES_TERMS)?;
            checks.at_most(format!("recursion_vs_closed_form[t={t}]"), r.discrepancy(), tol.recursion);
            exp_checks.push(CoeffCheck { t, discrepancy: r.discrepancy() });
        }
        csv = csv_table(
            "n,b_re,b_im,c_re,c_im,d_re,d_im",
            coefficients.iter().map(|r| {
                [r.b, r.c, r.d].iter().fold(vec![r.n.to_string()], |mut v, z| {
                    v.push(format_f64(z.re));
                    v.push(format_f64(z.im));
                    v
                })
            }),
        );
        report.plan = Some(summarize(&plan));
        report.coeffs = Some(CoeffSection {
            eigvec: j,
            lambda,
            alpha,
            s,
            coefficients,
            series_terms: DEFAULT_SERIES_TERMS,
            exp_checks,
        });
    }

    report.passed = checks.0.iter().all(|c| c.passed);
    report.checks = checks.0;
    report.timing = Timing {
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(Outcome { report, csv })
}
