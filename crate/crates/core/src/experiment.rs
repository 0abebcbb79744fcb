//! Experiment configuration, presets, validation and the run pipeline behind
//! the command-line tool.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::fit::{extrema_report, fit_displacement, fit_four_cat, fit_squeezed_cat, Extremum, FitResult};
use crate::grid::{fidelity, QuadratureGrid, WaveFunction, DEFAULT_EXTENT, DEFAULT_POINTS};
use crate::nges::{resource_norm_sq, SubtractionSpec};
use crate::oracle::{build_nges_2d, subtraction_identity_check, teleport_brute, ORACLE_EXTENT, ORACLE_POINTS};
use crate::states::{CpsSpec, CpsVariant, StateSpec};
use crate::teleport::{BellOutcome, IterationPlan, PlanStep, SweepCurve, SweepSettings, TeleportConfig, Teleporter};
use crate::wigner::{wigner_strided, WignerMap};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WAVECRAFT_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Cat,
    Fourcat,
    Fock,
    Cps,
    SuccessSweep,
    OracleCheck,
    CustomPlan,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Cat => "cat",
            ExperimentKind::Fourcat => "fourcat",
            ExperimentKind::Fock => "fock",
            ExperimentKind::Cps => "cps",
            ExperimentKind::SuccessSweep => "success-sweep",
            ExperimentKind::OracleCheck => "oracle-check",
            ExperimentKind::CustomPlan => "custom-plan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub extent: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_points: DEFAULT_POINTS, extent: DEFAULT_EXTENT }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeleportSettings {
    pub r_tele: f64,
    pub k: u32,
    pub l: u32,
}

impl Default for TeleportSettings {
    fn default() -> Self {
        Self { r_tele: 1.0, k: 1, l: 0 }
    }
}

/// Outcome sequence. With empty `m_x`, `iterations` steps at m = 0 are run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanConfig {
    pub iterations: usize,
    pub m_x: Vec<f64>,
    pub m_p: Vec<f64>,
    pub rotate: Vec<bool>,
    pub rotate_each_step: bool,
    /// Added to every m_x; the unshifted plan is the reference of a displacement fit.
    pub shift: f64,
}

impl PlanConfig {
    pub fn steps(&self) -> usize {
        if self.m_x.is_empty() {
            self.iterations
        } else {
            self.m_x.len()
        }
    }

    fn build(&self, shift: f64) -> crate::Result<IterationPlan> {
        let n = self.steps();
        let m_x: Vec<f64> =
            if self.m_x.is_empty() { vec![0.0; n] } else { self.m_x.clone() }.iter().map(|m| m + shift).collect();
        let rotate: Vec<bool> =
            if self.rotate_each_step { vec![true; n] } else { self.rotate.clone() };
        let plan = IterationPlan::from_vectors(&m_x, &self.m_p, &rotate)?;
        Ok(plan)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFamily {
    #[default]
    None,
    SqueezedCat,
    FourCat,
    Displacement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub thresholds: Vec<f64>,
    pub region: f64,
    pub resolution: usize,
    pub window_resolution: usize,
    pub window_fidelity: f64,
    /// Inputs swept one after another; each target is its own output at m = 0.
    pub inputs: Vec<StateSpec>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let s = SweepSettings::default();
        Self {
            thresholds: vec![0.0, 0.5, 0.8, 0.9, 0.95, 0.97, 0.98, 0.99, 0.995],
            region: s.region,
            resolution: s.resolution,
            window_resolution: s.window_resolution,
            window_fidelity: s.window_fidelity,
            inputs: sweep_inputs(1.0),
        }
    }
}

/// S(r)|0⟩, S(−r)|0⟩, S(r)|1⟩, S(−r)|1⟩.
pub fn sweep_inputs(r: f64) -> Vec<StateSpec> {
    vec![
        StateSpec::Squeezed { r },
        StateSpec::Squeezed { r: -r },
        StateSpec::Fock { n: 1, r },
        StateSpec::Fock { n: 1, r: -r },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub grid: GridConfig,
    pub cases_per_pair: usize,
    pub seed: u64,
    pub max_order: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { n_points: ORACLE_POINTS, extent: ORACLE_EXTENT },
            cases_per_pair: 10,
            seed: 20_240_601,
            max_order: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    pub enabled: bool,
    pub p_extent: f64,
    pub p_points: usize,
    pub x_stride: usize,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self { enabled: true, p_extent: 6.0, p_points: 121, x_stride: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub teleport: TeleportSettings,
    #[serde(default = "default_input")]
    pub input: StateSpec,
    #[serde(default)]
    pub plan: PlanConfig,
    #[serde(default)]
    pub target: Option<StateSpec>,
    #[serde(default)]
    pub fit: FitFamily,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub wigner: WignerConfig,
    /// Excluded from the config hash.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_input() -> StateSpec {
    StateSpec::Vacuum
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            label: None,
            grid: GridConfig::default(),
            teleport: TeleportSettings::default(),
            input: StateSpec::Vacuum,
            plan: PlanConfig::default(),
            target: None,
            fit: FitFamily::None,
            sweep: SweepConfig::default(),
            oracle: OracleConfig::default(),
            wigner: WignerConfig::default(),
            out_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out_dir = None;
        let json = serde_json::to_string(&canon).expect("configs serialize to JSON");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn grid(&self) -> crate::Result<QuadratureGrid> {
        QuadratureGrid::new(self.grid.n_points, self.grid.extent)
    }

    pub fn teleport_config(&self) -> crate::Result<TeleportConfig> {
        let t = self.teleport;
        TeleportConfig::new(t.r_tele, SubtractionSpec::new(t.k, t.l)?, self.grid()?)
    }
}

// ---------------------------------------------------------------------------
// presets

/// Squeezed-cat generation: S(r_in)|0⟩ through `iterations` f_{1,0} steps at m = 0.
pub fn cat_config(r_in: f64, iterations: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Cat);
    c.input = StateSpec::Squeezed { r: r_in };
    c.plan.iterations = iterations;
    c.fit = FitFamily::SqueezedCat;
    c
}

/// Four-component cats: vacuum through `iterations` f_{1,1} steps at m = 0.
pub fn fourcat_config(iterations: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Fourcat);
    c.teleport.k = 1;
    c.teleport.l = 1;
    c.plan.iterations = iterations;
    c.fit = FitFamily::FourCat;
    c
}

/// Reference outcome vectors m_x for the Fock-superposition targets.
pub fn fock_preset_outcomes(target: &str) -> Option<Vec<f64>> {
    match target {
        "0+1" => Some(vec![-0.63]),
        "0+3" => Some(vec![-0.91, 0.93, 0.46]),
        "0+1+2+3" => Some(vec![-1.06, 0.13, 0.36]),
        "2+3" => Some(vec![-1.27, -0.13, 0.99]),
        _ => None,
    }
}

/// Fock superposition from vacuum; known targets get their reference m_x, others need one.
pub fn fock_config(target: &str) -> Result<ExperimentConfig, RunError> {
    let mut c = ExperimentConfig::new(ExperimentKind::Fock);
    c.target = Some(StateSpec::FockSuperposition { coeffs: parse_fock_target(target)? });
    c.plan.m_x = fock_preset_outcomes(target).unwrap_or_default();
    c.label = Some(format!("fock {target}"));
    Ok(c)
}

pub fn cps_config(panel: CpsPanel) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Cps);
    c.input = StateSpec::Squeezed { r: panel.r_in };
    c.plan.m_x = panel.m_x.to_vec();
    c.target = Some(StateSpec::Cps(panel.spec));
    c
}

/// Success sweep over S(±r)|0⟩ and S(±r)|1⟩.
pub fn sweep_config(r: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::SuccessSweep);
    c.sweep.inputs = sweep_inputs(r);
    c
}

/// Parses "0+1+3" into unit coefficients on the listed Fock states.
pub fn parse_fock_target(target: &str) -> Result<Vec<f64>, RunError> {
    let mut coeffs = Vec::new();
    for part in target.split('+') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| RunError::Config(format!("bad Fock target {target:?}: expected e.g. 0+1")))?;
        if coeffs.len() <= n {
            coeffs.resize(n + 1, 0.0);
        }
        coeffs[n] = 1.0;
    }
    Ok(coeffs)
}

/// One cubic-phase-state preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpsPanel {
    pub spec: CpsSpec,
    pub r_in: f64,
    pub m_x: &'static [f64],
}

pub fn cps_panels(gamma: f64) -> [CpsPanel; 4] {
    let herm = |order| CpsSpec { gamma, variant: CpsVariant::HermiteSeries { order, xi: 0.0 } };
    let airy = |p0| CpsSpec { gamma, variant: CpsVariant::Airy { p0, xi: 0.6 } };
    [
        CpsPanel { spec: herm(1), r_in: 0.0, m_x: &[0.78, -1.51, 0.58] },
        CpsPanel { spec: herm(2), r_in: 0.7, m_x: &[0.61, -1.15, -0.23, 0.60] },
        CpsPanel { spec: airy(8.0), r_in: -0.7, m_x: &[2.80, 1.39, -1.18, -0.08, 1.02] },
        CpsPanel { spec: airy(9.0), r_in: -0.7, m_x: &[-1.73, 1.72, -0.68, 1.02, 0.08] },
    ]
}

/// Panel matching a requested variant; Airy panels are told apart by p₀.
pub fn cps_panel_for(variant: &str, p0: Option<f64>, gamma: f64) -> Result<CpsPanel, RunError> {
    let panels = cps_panels(gamma);
    match variant {
        "order1" | "hermite1" => Ok(panels[0]),
        "order2" | "hermite2" => Ok(panels[1]),
        "airy" => {
            let p0 = p0.unwrap_or(9.0);
            let base = if (p0 - 8.0).abs() < (p0 - 9.0).abs() { panels[2] } else { panels[3] };
            let xi = match base.spec.variant {
                CpsVariant::Airy { xi, .. } => xi,
                CpsVariant::HermiteSeries { xi, .. } => xi,
            };
            Ok(CpsPanel { spec: CpsSpec { gamma, variant: CpsVariant::Airy { p0, xi } }, ..base })
        }
        other => Err(RunError::Config(format!("unknown CPS variant {other:?} (order1, order2, airy)"))),
    }
}

// ---------------------------------------------------------------------------
// validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub eta: f64,
    pub nyquist_momentum: Option<f64>,
    pub findings: Vec<Finding>,
}

impl Diagnostics {
    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }
}

/// Static checks of a config; nothing is teleported.
pub fn validate(config: &ExperimentConfig) -> Diagnostics {
    let mut findings = Vec::new();
    let mut err = |code, message: String| findings.push(Finding { severity: Severity::Error, code, message });
    let eta = config.teleport.r_tele.tanh();
    let grid = match config.grid() {
        Ok(g) => Some(g),
        Err(e) => {
            err("grid", e.to_string());
            None
        }
    };
    if let Err(e) = SubtractionSpec::new(config.teleport.k, config.teleport.l) {
        err("subtraction", e.to_string());
    }
    let plan_kinds = !matches!(config.kind, ExperimentKind::SuccessSweep | ExperimentKind::OracleCheck);
    if plan_kinds {
        let p = &config.plan;
        if p.steps() == 0 {
            err("plan", "plan is empty: give m_x or iterations".into());
        } else if let Err(e) = p.build(p.shift) {
            err("plan", e.to_string());
        }
    }
    if let Some(g) = grid {
        if let Err(e) = config.teleport_config() {
            err("teleport", e.to_string());
        }
        let inputs: Vec<&StateSpec> = if config.kind == ExperimentKind::SuccessSweep {
            config.sweep.inputs.iter().collect()
        } else {
            vec![&config.input]
        };
        for spec in inputs {
            if let Err(e) = spec.build(g) {
                err("input", format!("{spec:?}: {e}"));
            }
        }
        if let Some(t) = &config.target {
            if let Err(e) = t.build(g) {
                err("target", format!("{t:?}: {e}"));
            }
        }
        // ∏(x − m_i) on a Gaussian of width w peaks near ±√n·w
        if plan_kinds {
            if let Some(width) = input_width(&config.input) {
                let n = config.plan.steps() as f64;
                let m_max = config.plan.m_x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let reach = n.sqrt() * width + m_max;
                if reach >= g.extent() {
                    err(
                        "support",
                        format!(
                            "output extrema near ±{reach:.2} (√n·width + max|m_x|) exceed the grid extent {}",
                            g.extent()
                        ),
                    );
                }
            }
        }
        if config.wigner.enabled {
            let limit = std::f64::consts::PI / (2.0 * g.spacing());
            if config.wigner.p_extent >= limit || config.wigner.p_points < 2 || config.wigner.x_stride == 0 {
                err("wigner", format!("momentum extent must be below π/(2dx) = {limit:.3} with ≥ 2 points"));
            }
        }
        let kw = config.teleport.r_tele;
        let kernel_width = (-kw).exp() / 2f64.sqrt();
        if kernel_width < 2.0 * g.spacing() {
            findings.push(Finding {
                severity: Severity::Warning,
                code: "kernel",
                message: format!("TMSS kernel width {kernel_width:.4} spans fewer than two grid spacings"),
            });
        }
    }
    let mut err = |code, message: String| findings.push(Finding { severity: Severity::Error, code, message });
    match config.kind {
        ExperimentKind::SuccessSweep => {
            let s = &config.sweep;
            if s.inputs.is_empty() || s.resolution < 2 || s.window_resolution < 2 || !(s.region > 0.0) {
                err("sweep", "sweep needs inputs, a positive region and ≥ 2 points per axis".into());
            }
            if s.thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
                err("sweep", "thresholds must lie in [0, 1]".into());
            }
        }
        ExperimentKind::OracleCheck => {
            if config.oracle.max_order > 2 {
                err("oracle", "the oracle covers k + l ≤ 2".into());
            }
        }
        ExperimentKind::Fock | ExperimentKind::Cps if config.target.is_none() => {
            err("target", format!("{} experiments need a target", config.kind.name()));
        }
        _ => {}
    }
    if config.fit == FitFamily::Displacement && config.plan.shift == 0.0 {
        findings.push(Finding {
            severity: Severity::Warning,
            code: "fit",
            message: "displacement fit with zero plan shift compares the output with itself".into(),
        });
    }
    Diagnostics { eta, nyquist_momentum: grid.map(|g| g.nyquist_momentum()), findings }
}

/// Position-space width e^{−r} of squeezed inputs.
fn input_width(spec: &StateSpec) -> Option<f64> {
    match spec {
        StateSpec::Vacuum => Some(1.0),
        StateSpec::Squeezed { r } | StateSpec::Fock { r, .. } => Some((-r).exp()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// running

/// Failure of a run, with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("I/O error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Engine(e) if e.is_numerical() => 3,
            RunError::Engine(_) => 2,
            RunError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Engine(Error::NullState { .. } | Error::NullStep { .. }) => "null-state",
            RunError::Engine(e) if e.is_numerical() => "numerical",
            RunError::Engine(_) => "invalid-input",
            RunError::Io(_) => "io",
        }
    }

    /// Single-line JSON error record.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() } })
            .to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub input: StateSpec,
    pub curve: SweepCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCase {
    pub k: u32,
    pub l: u32,
    pub m_x: f64,
    pub m_p: f64,
    pub fidelity: f64,
    pub weight_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub cases: Vec<OracleCase>,
    pub min_fidelity: f64,
    /// Largest |ratio − 1| of brute to analytic weight, after the fixed resource-norm factor.
    pub max_ratio_deviation: f64,
    pub subtraction_identity: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub kind: ExperimentKind,
    pub label: Option<String>,
    pub config_hash: String,
    pub eta: f64,
    pub step_weights: Vec<f64>,
    /// Fidelity to the explicit target, else to the best fit.
    pub fidelity: Option<f64>,
    pub fit: Option<FitResult>,
    /// Fidelity of the shifted output to the unshifted one, before a displacement fit.
    pub raw_displacement_fidelity: Option<f64>,
    pub extrema: Vec<Extremum>,
    pub normalization_residual: Option<f64>,
    pub sweeps: Vec<SweepRecord>,
    pub oracle: Option<OracleReport>,
    pub wall_clock_seconds: f64,
}

/// Everything a run produces before it is written out.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub summary: RunSummary,
    pub state: WaveFunction,
    pub wigner: Option<WignerMap>,
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let diag = validate(config);
    if let Some(f) = diag.findings.iter().find(|f| f.severity == Severity::Error) {
        return Err(RunError::Config(format!("{}: {}", f.code, f.message)));
    }
    let start = Instant::now();
    let grid = config.grid()?;
    let mut summary = RunSummary {
        kind: config.kind,
        label: config.label.clone(),
        config_hash: config.hash(),
        eta: diag.eta,
        step_weights: Vec::new(),
        fidelity: None,
        fit: None,
        raw_displacement_fidelity: None,
        extrema: Vec::new(),
        normalization_residual: None,
        sweeps: Vec::new(),
        oracle: None,
        wall_clock_seconds: 0.0,
    };
    let state = match config.kind {
        ExperimentKind::SuccessSweep => run_sweeps(config, &mut summary)?,
        ExperimentKind::OracleCheck => run_oracle(config, &mut summary)?,
        _ => run_plan_kind(config, grid, &mut summary)?,
    };
    summary.extrema = extrema_report(&state)?;
    let wigner = if config.wigner.enabled {
        let w = config.wigner;
        Some(wigner_strided(&state, w.p_extent, w.p_points, w.x_stride)?)
    } else {
        None
    };
    summary.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutput { config: config.clone(), summary, state, wigner })
}

fn run_plan_kind(config: &ExperimentConfig, grid: QuadratureGrid, summary: &mut RunSummary) -> Result<WaveFunction, RunError> {
    let teleporter = Teleporter::new(config.teleport_config()?)?;
    let input = config.input.build(grid)?;
    let plan = config.plan.build(config.plan.shift)?;
    let result = teleporter.run_plan(&input, &plan)?;
    summary.step_weights = result.step_weights.clone();
    let state = result.state;
    let fit = match config.fit {
        FitFamily::None => None,
        FitFamily::SqueezedCat => Some(fit_squeezed_cat(&state)?),
        FitFamily::FourCat => Some(fit_four_cat(&state)?),
        FitFamily::Displacement => {
            let reference = teleporter.run_plan(&input, &config.plan.build(0.0)?)?.state;
            summary.raw_displacement_fidelity = Some(fidelity(&state, &reference)?);
            Some(fit_displacement(&state, &reference)?)
        }
    };
    summary.fit = fit;
    summary.fidelity = match &config.target {
        Some(t) => Some(fidelity(&state, &t.build(grid)?)?),
        None => fit.map(|f| f.fidelity),
    };
    Ok(state)
}

fn run_sweeps(config: &ExperimentConfig, summary: &mut RunSummary) -> Result<WaveFunction, RunError> {
    let grid = config.grid()?;
    let teleporter = Teleporter::new(config.teleport_config()?)?;
    let s = &config.sweep;
    let settings = SweepSettings {
        region: s.region,
        resolution: s.resolution,
        window_resolution: s.window_resolution,
        window_fidelity: s.window_fidelity,
        ..SweepSettings::default()
    };
    let mut first = None;
    let mut residual = 0.0f64;
    for spec in &s.inputs {
        let psi = spec.build(grid)?;
        let target = teleporter.step(&psi, BellOutcome::default())?;
        let curve = teleporter.success_sweep(&psi, &target, &s.thresholds, &settings)?;
        residual = residual.max(curve.normalization_residual);
        summary.sweeps.push(SweepRecord { input: spec.clone(), curve });
        first.get_or_insert(target.normalized()?);
    }
    summary.normalization_residual = Some(residual);
    Ok(first.expect("validated sweeps have inputs"))
}

fn run_oracle(config: &ExperimentConfig, summary: &mut RunSummary) -> Result<WaveFunction, RunError> {
    let o = &config.oracle;
    let grid = QuadratureGrid::new(o.grid.n_points, o.grid.extent)?;
    let r = config.teleport.r_tele;
    let mut rng = StdRng::seed_from_u64(o.seed);
    let mut cases = Vec::new();
    let mut last = None;
    for order in 0..=o.max_order {
        for k in 0..=order {
            let spec = SubtractionSpec::new(k, order - k)?;
            let teleporter = Teleporter::new(TeleportConfig::new(r, spec, grid)?)?;
            let nges = build_nges_2d(spec, r, grid)?;
            let scale = resource_norm_sq(teleporter.poly());
            for _ in 0..o.cases_per_pair {
                let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let m = BellOutcome::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let psi = crate::states::fock_superposition(&coeffs, grid)?;
                let analytic = teleporter.step(&psi, m)?;
                let brute = teleport_brute(&psi, &nges, m)?;
                cases.push(OracleCase {
                    k,
                    l: order - k,
                    m_x: m.m_x,
                    m_p: m.m_p,
                    fidelity: fidelity(&analytic, &brute)?,
                    weight_ratio: brute.norm_sq() / analytic.norm_sq() * scale,
                });
                last = Some(analytic);
            }
        }
    }
    let min_fidelity = cases.iter().map(|c| c.fidelity).fold(1.0, f64::min);
    let max_ratio_deviation = cases.iter().map(|c| (c.weight_ratio - 1.0).abs()).fold(0.0, f64::max);
    let eta = r.tanh();
    let subtraction_identity = (1..=2)
        .map(|k| subtraction_identity_check(eta, fock_cutoff(eta), k).map(|d| (k, d)))
        .collect::<crate::Result<_>>()?;
    summary.fidelity = Some(min_fidelity);
    summary.oracle = Some(OracleReport { cases, min_fidelity, max_ratio_deviation, subtraction_identity });
    let state = last.ok_or_else(|| RunError::Config("oracle check ran no cases".into()))?;
    Ok(state.normalized()?)
}

/// Smallest n_max with η^{n_max} below 1e−9.
fn fock_cutoff(eta: f64) -> usize {
    if eta <= 0.0 {
        return 1;
    }
    ((1e-9f64).ln() / eta.ln()).ceil().max(1.0) as usize
}

// ---------------------------------------------------------------------------
// output

/// Output directory: explicit choice, else `$WAVECRAFT_OUT`, else `wavecraft-out/<kind>`.
pub fn resolve_out_dir(config: &ExperimentConfig) -> PathBuf {
    if let Some(d) = &config.out_dir {
        return d.clone();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => PathBuf::from("wavecraft-out").join(config.kind.name()),
    }
}

fn header(out: &RunOutput, columns: &str) -> String {
    format!(
        "# wavecraft {} run\n# config_sha256 = {}\n{columns}\n",
        out.config.kind.name(),
        out.summary.config_hash
    )
}

pub fn wavefunction_csv(out: &RunOutput) -> String {
    let mut s = header(out, "x,re,im,abs2");
    for (x, a) in out.state.grid().points().zip(out.state.amplitudes()) {
        let _ = writeln!(s, "{x:.10e},{:.10e},{:.10e},{:.10e}", a.re, a.im, a.norm_sqr());
    }
    s
}

pub fn wigner_csv(out: &RunOutput, w: &WignerMap) -> String {
    let mut s = header(out, "x,p,W");
    for (i, x) in w.xs.iter().enumerate() {
        for (j, p) in w.ps.iter().enumerate() {
            let _ = writeln!(s, "{x:.10e},{p:.10e},{:.10e}", w.at(i, j));
        }
    }
    s
}

pub fn sweep_csv(out: &RunOutput) -> String {
    let mut s = header(out, "input,threshold,probability");
    for (idx, rec) in out.summary.sweeps.iter().enumerate() {
        for (t, p) in rec.curve.thresholds.iter().zip(&rec.curve.probabilities) {
            let _ = writeln!(s, "{idx},{t},{p:.10e}");
        }
    }
    s
}

/// Writes wavefunction.csv, wigner.csv, summary.json, config.toml (and sweep.csv for sweeps).
pub fn write_artifacts(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut files = vec![("wavefunction.csv", wavefunction_csv(out))];
    if let Some(w) = &out.wigner {
        files.push(("wigner.csv", wigner_csv(out, w)));
    }
    if !out.summary.sweeps.is_empty() {
        files.push(("sweep.csv", sweep_csv(out)));
    }
    files.push(("summary.json", serde_json::to_string_pretty(&out.summary).expect("summary serializes") + "\n"));
    files.push(("config.toml", out.config.to_toml()));
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io)?;
        written.push(path);
    }
    Ok(written)
}

/// The plan steps a config resolves to, for echoing.
pub fn resolved_plan(config: &ExperimentConfig) -> crate::Result<Vec<PlanStep>> {
    Ok(config.plan.build(config.plan.shift)?.steps().to_vec())
}
