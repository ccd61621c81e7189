//! Command-line front end: a JSON run configuration, one subcommand per task,
//! CSV/JSON plot data out.
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver or I/O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::correlation::{correlation_report, ReportOptions, XiStatus};
use crate::error::Error;
use crate::fermion::{ground_sector, SectorMode};
use crate::meanfield::{measured_order_parameters, minimize_phi, MeanFieldState, SearchGrid};
use crate::model::{effective_field, SystemParams};
use crate::phases::{
    classify_magnetic_order, critical_coupling, phase_diagram, sweep, Axis, FieldPhase,
    MagneticDiagnostics, MagneticOrder, MagneticThresholds, PhaseDiagram, PhaseDiagramSpec,
    SweepResult,
};
use crate::validation::{validate_random_instances, ValidationOptions, ValidationReport};

#[derive(Debug, Parser)]
#[command(
    name = "cavity-ising",
    version,
    about = "Mean-field phases of an Ising chain in a multi-mode resonator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the mean-field energy and write state.json.
    Solve(CommonArgs),
    /// Sweep λ₀, J_min or E_z and write φᵍ per grid point.
    Sweep(CommonArgs),
    /// Label a (E_z, J_min, λ₀) grid and locate λ₀ᶜ and the order crossover.
    PhaseDiagram(CommonArgs),
    /// Spin expectations, correlators and correlation lengths at the ground state.
    Correlations(CommonArgs),
    /// Compare the free-fermion solver with exact diagonalization.
    Validate(CommonArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Solve(a) => ("solve", a),
            Command::Sweep(a) => ("sweep", a),
            Command::PhaseDiagram(a) => ("phase-diagram", a),
            Command::Correlations(a) => ("correlations", a),
            Command::Validate(a) => ("validate", a),
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Plot-data format; overrides `output.format`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            format: Format::Csv,
        }
    }
}

/// Evenly spaced grid `start, start + step, …` up to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        if !(self.step > 0.0)
            || !self.start.is_finite()
            || !self.stop.is_finite()
            || self.stop < self.start
        {
            return Err(format!("bad range {self:?}"));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| self.start + k as f64 * self.step)
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveTask {
    /// Also evaluate Σˣ from ⟨σˣ_j⟩ as a self-consistency check.
    #[serde(default = "yes")]
    pub measure: bool,
}

fn yes() -> bool {
    true
}

impl Default for SolveTask {
    fn default() -> Self {
        SolveTask { measure: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTask {
    #[serde(default = "default_axis")]
    pub axis: Axis,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub range: Option<Range>,
    /// Solve each mode of the model on its own instead of jointly.
    #[serde(default)]
    pub independent_modes: bool,
    /// Attach stationary points (single-mode sweeps only).
    #[serde(default)]
    pub stationary: bool,
}

fn default_axis() -> Axis {
    Axis::Lambda0
}

impl SweepTask {
    fn grid(&self) -> Result<Vec<f64>, String> {
        match (&self.values, &self.range) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some(r)) => r.values(),
            _ => Err("sweep needs exactly one of `values` or `range`".into()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationTask {
    /// Largest separation tabulated in rho.csv.
    #[serde(default = "default_rho_max")]
    pub rho_max: usize,
    /// Correlation-length scan window; default N/2.
    #[serde(default)]
    pub xi_window: Option<usize>,
    #[serde(default)]
    pub thresholds: MagneticThresholds,
    /// Evaluate at these order parameters instead of the minimizer.
    #[serde(default)]
    pub phi: Option<Vec<f64>>,
}

fn default_rho_max() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    Solve(SolveTask),
    Sweep(SweepTask),
    PhaseDiagram(PhaseDiagramSpec),
    Correlations(CorrelationTask),
    Validate(ValidationOptions),
}

impl TaskConfig {
    fn name(&self) -> &'static str {
        match self {
            TaskConfig::Solve(_) => "solve",
            TaskConfig::Sweep(_) => "sweep",
            TaskConfig::PhaseDiagram(_) => "phase-diagram",
            TaskConfig::Correlations(_) => "correlations",
            TaskConfig::Validate(_) => "validate",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: SystemParams,
    #[serde(default)]
    pub search: SearchGrid,
    #[serde(default)]
    pub task: Option<TaskConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::Config(_)
            | Error::LengthMismatch { .. }
            | Error::TooLarge(_) => CliError::Config(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Parse arguments, run, and return the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Execute one subcommand; returns a short human-readable summary.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let (name, args) = cli.command.parts();
    let config = RunConfig::load(&args.config)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| config.output.dir.clone());
    let format = args.format.unwrap_or(config.output.format);
    if let Some(task) = &config.task {
        if task.name() != name {
            return Err(CliError::Config(format!(
                "config holds a `{}` task but `{name}` was requested",
                task.name()
            )));
        }
    }
    // Check the model before spending any time on it.
    config.model.build()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Solve(_) => {
            let task = match &config.task {
                Some(TaskConfig::Solve(t)) => t.clone(),
                _ => SolveTask::default(),
            };
            cmd_solve(&config, &task, &out, format)
        }
        Command::Sweep(_) => match &config.task {
            Some(TaskConfig::Sweep(t)) => cmd_sweep(&config, t, &out, format),
            _ => Err(CliError::Config("sweep needs a `task.sweep` block".into())),
        },
        Command::PhaseDiagram(_) => match &config.task {
            Some(TaskConfig::PhaseDiagram(t)) => cmd_phase_diagram(&config, t, &out, format),
            _ => Err(CliError::Config(
                "phase-diagram needs a `task.phase-diagram` block".into(),
            )),
        },
        Command::Correlations(_) => {
            let task = match &config.task {
                Some(TaskConfig::Correlations(t)) => t.clone(),
                _ => CorrelationTask {
                    rho_max: default_rho_max(),
                    ..CorrelationTask::default()
                },
            };
            cmd_correlations(&config, &task, &out, format)
        }
        Command::Validate(_) => {
            let task = match &config.task {
                Some(TaskConfig::Validate(t)) => *t,
                _ => ValidationOptions::default(),
            };
            cmd_validate(&task, &out, format)
        }
    })
}

fn prepare(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(io_err(out))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let wrap = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(io_err(path))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Contents of `state.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub model: SystemParams,
    pub modes: Vec<usize>,
    pub phi_g: Vec<f64>,
    pub sigma_x: Vec<f64>,
    /// Σˣ evaluated from ⟨σˣ_j⟩ directly, when requested.
    pub sigma_x_measured: Option<Vec<f64>>,
    pub e_gg: f64,
    pub sector: String,
    pub field_phase: FieldPhase,
    pub boundary_hit: bool,
    pub degenerate_minima: Vec<Vec<f64>>,
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
}

pub fn solve_state(config: &RunConfig, measure: bool) -> Result<StateFile, CliError> {
    let (chain, modes) = config.model.build()?;
    let state = minimize_phi(&chain, &modes, &config.search)?;
    let field = effective_field(&chain, &modes, &state.phi)?;
    let sigma_x_measured = if measure {
        Some(measured_order_parameters(&chain, &modes, &state.phi)?)
    } else {
        None
    };
    Ok(StateFile {
        model: config.model.clone(),
        modes: modes.indices(),
        phi_g: state.phi.clone(),
        sigma_x: state.sigma_x.clone(),
        sigma_x_measured,
        e_gg: state.e_g,
        sector: "even".into(),
        field_phase: FieldPhase::of(&state),
        boundary_hit: state.boundary_hit,
        degenerate_minima: state.alternatives.clone(),
        omega: field.omega,
        theta: field.theta,
    })
}

fn cmd_solve(
    config: &RunConfig,
    task: &SolveTask,
    out: &Path,
    format: Format,
) -> Result<String, CliError> {
    let state = solve_state(config, task.measure)?;
    prepare(out)?;
    write_json(&out.join("state.json"), &state)?;
    if format == Format::Csv {
        let couplings = config.model.chain()?.couplings().to_vec();
        write_csv(
            &out.join("field.csv"),
            &["j", "J", "omega", "theta"],
            (0..state.omega.len()).map(|j| {
                vec![
                    j.to_string(),
                    num(couplings[j]),
                    num(state.omega[j]),
                    num(state.theta[j]),
                ]
            }),
        )?;
    }
    Ok(format!("phi_g = {:?}, e_gg = {}", state.phi_g, state.e_gg))
}

/// One entry of `sweep_summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalEntry {
    pub modes: Vec<usize>,
    pub lambda_c: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub critical: Vec<CriticalEntry>,
    pub failed_points: usize,
}

fn cmd_sweep(
    config: &RunConfig,
    task: &SweepTask,
    out: &Path,
    format: Format,
) -> Result<String, CliError> {
    let grid = task.grid().map_err(CliError::Config)?;
    let groups: Vec<Vec<usize>> = if task.independent_modes {
        config.model.modes.iter().map(|&l| vec![l]).collect()
    } else {
        vec![config.model.modes.clone()]
    };
    let mut results: Vec<SweepResult> = Vec::new();
    for modes in &groups {
        let base = SystemParams {
            modes: modes.clone(),
            ..config.model.clone()
        };
        results.push(sweep(
            &base,
            task.axis,
            &grid,
            &config.search,
            task.stationary,
        )?);
    }
    let critical = if task.axis == Axis::Lambda0 {
        results
            .iter()
            .map(|r| match critical_coupling(r) {
                Ok(lc) => CriticalEntry {
                    modes: r.base.modes.clone(),
                    lambda_c: Some(lc),
                    error: None,
                },
                Err(e) => CriticalEntry {
                    modes: r.base.modes.clone(),
                    lambda_c: None,
                    error: Some(e.to_string()),
                },
            })
            .collect()
    } else {
        Vec::new()
    };
    let failed_points = results
        .iter()
        .flat_map(|r| &r.points)
        .filter(|p| p.error.is_some())
        .count();
    let summary = SweepSummary {
        axis: task.axis,
        values: grid.clone(),
        critical,
        failed_points,
    };

    prepare(out)?;
    write_json(&out.join("sweep_summary.json"), &summary)?;
    match format {
        Format::Json => write_json(&out.join("sweep.json"), &results)?,
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &results {
                for p in &r.points {
                    for (k, &l) in r.base.modes.iter().enumerate() {
                        let (phi, sx, e, status) = match &p.state {
                            Some(s) => (
                                num(s.phi[k]),
                                num(s.sigma_x[k]),
                                num(s.e_g),
                                "ok".to_string(),
                            ),
                            None => (
                                String::new(),
                                String::new(),
                                String::new(),
                                p.error.clone().unwrap_or_default(),
                            ),
                        };
                        rows.push(vec![num(p.value), l.to_string(), phi, sx, e, status]);
                    }
                }
            }
            write_csv(
                &out.join("sweep.csv"),
                &[
                    task.axis.name(),
                    "mode",
                    "phi_g",
                    "sigma_x",
                    "e_gg",
                    "status",
                ],
                rows,
            )?;
        }
    }
    let lcs: Vec<String> = summary
        .critical
        .iter()
        .map(|c| {
            format!(
                "{:?}: {}",
                c.modes,
                c.lambda_c.map_or("none".into(), |v| format!("{v:.5}"))
            )
        })
        .collect();
    Ok(format!(
        "{} points x {} group(s); lambda0_c {}",
        grid.len(),
        results.len(),
        lcs.join(", ")
    ))
}

/// `phase_diagram.json`: the diagram without its cells (those go to CSV
/// unless `--format json`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramFile {
    pub diagram: PhaseDiagram,
    pub condensed_threshold: f64,
}

fn cmd_phase_diagram(
    config: &RunConfig,
    spec: &PhaseDiagramSpec,
    out: &Path,
    format: Format,
) -> Result<String, CliError> {
    let mut diagram = phase_diagram(&config.model, spec, &config.search)?;
    prepare(out)?;
    if format == Format::Csv {
        let modes = config.model.modes.clone();
        let mut header = vec![
            "E_z".to_string(),
            "J_min".into(),
            "J_max".into(),
            "lambda0".into(),
        ];
        header.extend(modes.iter().map(|l| format!("phi_{l}")));
        header.extend(
            [
                "e_gg",
                "field_phase",
                "transition_order",
                "magnetic_order",
                "status",
            ]
            .map(String::from),
        );
        let rows = diagram.cells.iter().map(|c| {
            let mut row = vec![num(c.e_z), num(c.j_min), num(c.j_max), num(c.lambda0)];
            if c.phi.len() == modes.len() {
                row.extend(c.phi.iter().map(|&p| num(p)));
            } else {
                row.extend(modes.iter().map(|_| String::new()));
            }
            row.push(c.e_g.map_or(String::new(), num));
            match &c.label {
                Some(l) => {
                    row.push(json_label(&l.field_phase));
                    row.push(json_label(&l.transition_order));
                    row.push(l.magnetic_order.map_or(String::new(), |m| m.label().into()));
                }
                None => row.extend([String::new(), String::new(), String::new()]),
            }
            row.push(c.error.clone().unwrap_or_else(|| "ok".into()));
            row
        });
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(
            &out.join("phase_diagram.csv"),
            &header,
            rows.collect::<Vec<_>>(),
        )?;
        diagram.cells.clear();
    }
    let crossover: Vec<String> = diagram
        .crossover
        .iter()
        .map(|c| {
            format!(
                "E_z {}: {}",
                c.e_z,
                c.j_min.map_or("none".into(), |v| format!("{v:.4}"))
            )
        })
        .collect();
    write_json(
        &out.join("phase_diagram.json"),
        &PhaseDiagramFile {
            diagram,
            condensed_threshold: crate::phases::CONDENSED_THRESHOLD,
        },
    )?;
    Ok(format!("crossover J_min: {}", crossover.join(", ")))
}

fn json_label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteRow {
    pub j: usize,
    pub sigma_z_rot: f64,
    pub sigma_z_lab: f64,
    pub sigma_x_lab: f64,
    pub xi_r: f64,
    pub xi_l: f64,
    pub xi_rl: f64,
    pub xi_r_status: XiStatus,
    pub xi_l_status: XiStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFile {
    pub phi: Vec<f64>,
    pub field_phase: FieldPhase,
    pub magnetic_order: MagneticOrder,
    pub diagnostics: MagneticDiagnostics,
    pub thresholds: MagneticThresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<SiteRow>>,
    /// `(j, n, ρ_{j,j+n})`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<(usize, usize, f64)>>,
}

fn cmd_correlations(
    config: &RunConfig,
    task: &CorrelationTask,
    out: &Path,
    format: Format,
) -> Result<String, CliError> {
    let (chain, modes) = config.model.build()?;
    let state = match &task.phi {
        Some(phi) => {
            if phi.len() != modes.len() {
                return Err(CliError::Config(format!(
                    "phi has {} entries for {} modes",
                    phi.len(),
                    modes.len()
                )));
            }
            let e_g = crate::meanfield::energy_per_particle(&chain, &modes, phi)?;
            let sigma_x = modes
                .modes()
                .iter()
                .zip(phi)
                .map(|(m, p)| m.stiffness() * p)
                .collect();
            MeanFieldState {
                phi: phi.clone(),
                sigma_x,
                e_g,
                boundary_hit: false,
                alternatives: Vec::new(),
            }
        }
        None => minimize_phi(&chain, &modes, &config.search)?,
    };
    let field = effective_field(&chain, &modes, &state.phi)?;
    let solution = ground_sector(&field, chain.couplings(), SectorMode::Even)?;
    let report = correlation_report(
        &solution,
        &field,
        ReportOptions {
            xi_window: task.xi_window,
            rho_max: task.rho_max,
        },
    )?;
    let phase = FieldPhase::of(&state);
    let magnetic = classify_magnetic_order(&report, phase, &chain, &task.thresholds)?;
    let sites: Vec<SiteRow> = (0..chain.n())
        .map(|j| {
            let l = &report.lengths[j];
            SiteRow {
                j,
                sigma_z_rot: report.sigma_z_rot[j],
                sigma_z_lab: report.sigma_z_lab[j],
                sigma_x_lab: report.sigma_x_lab[j],
                xi_r: l.right,
                xi_l: l.left,
                xi_rl: l.mean(),
                xi_r_status: l.right_status,
                xi_l_status: l.left_status,
            }
        })
        .collect();

    prepare(out)?;
    let mut file = CorrelationFile {
        phi: state.phi.clone(),
        field_phase: phase,
        magnetic_order: magnetic.order,
        diagnostics: magnetic.diagnostics,
        thresholds: task.thresholds,
        sites: None,
        rho: None,
    };
    match format {
        Format::Csv => {
            write_csv(
                &out.join("sites.csv"),
                &[
                    "j",
                    "J",
                    "omega",
                    "theta",
                    "sigma_z_rot",
                    "sigma_z_lab",
                    "sigma_x_lab",
                    "xi_R",
                    "xi_L",
                    "xi_RL",
                    "xi_R_status",
                    "xi_L_status",
                ],
                sites.iter().map(|s| {
                    vec![
                        s.j.to_string(),
                        num(chain.couplings()[s.j]),
                        num(field.omega[s.j]),
                        num(field.theta[s.j]),
                        num(s.sigma_z_rot),
                        num(s.sigma_z_lab),
                        num(s.sigma_x_lab),
                        num(s.xi_r),
                        num(s.xi_l),
                        num(s.xi_rl),
                        json_label(&s.xi_r_status),
                        json_label(&s.xi_l_status),
                    ]
                }),
            )?;
            write_csv(
                &out.join("rho.csv"),
                &["j", "n", "rho"],
                report
                    .rho
                    .iter()
                    .map(|&(j, n, v)| vec![j.to_string(), n.to_string(), num(v)]),
            )?;
        }
        Format::Json => {
            file.sites = Some(sites);
            file.rho = Some(report.rho.clone());
        }
    }
    write_json(&out.join("correlations.json"), &file)?;
    Ok(format!("phi = {:?}: {}", state.phi, magnetic.order.label()))
}

fn cmd_validate(
    options: &ValidationOptions,
    out: &Path,
    format: Format,
) -> Result<String, CliError> {
    let report: ValidationReport = validate_random_instances(options)?;
    prepare(out)?;
    write_json(&out.join("validation.json"), &report)?;
    if format == Format::Csv {
        write_csv(
            &out.join("validation.csv"),
            &[
                "instance",
                "energy_fermion",
                "energy_exact",
                "energy_deviation",
                "sigma_z_deviation",
                "rho_deviation",
            ],
            report.instances.iter().enumerate().map(|(i, r)| {
                vec![
                    i.to_string(),
                    num(r.energy_fermion),
                    num(r.energy_exact),
                    num(r.energy_deviation),
                    num(r.sigma_z_deviation),
                    num(r.rho_deviation),
                ]
            }),
        )?;
    }
    let line = format!(
        "{} instances, N = {}: max relative energy deviation {:.3e}, max sigma_z deviation {:.3e}, max rho deviation {:.3e}",
        report.instances.len(),
        options.n,
        report.max_energy_deviation,
        report.max_sigma_z_deviation,
        report.max_rho_deviation
    );
    if report.passed {
        Ok(format!("{line}: pass"))
    } else {
        Err(CliError::Solver(format!("{line}: FAIL")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"model": {"N": 10, "bogus": 1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"extra": true}"#).is_err());
        assert!(RunConfig::from_json(
            r#"{"task": {"sweep": {"axis": "lambda0", "values": [0.1], "what": 2}}}"#
        )
        .is_err());
    }

    #[test]
    fn defaults_follow_the_reference_setup() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c.model.n, 200);
        assert_eq!(c.model.e_z, 0.8);
        assert_eq!(c.model.e_c, 8.0);
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn config_round_trips() {
        let text = r#"{
            "model": {"N": 40, "E_z": 0.1, "ising": {"kind": "rectangular", "J_max": 0.026, "J_min": 0.001, "period": 2}, "modes": [1, 2, 3], "lambda0": 0.2},
            "task": {"phase-diagram": {"j_min": [0.1, 0.2], "lambda0": [0.5], "delta_j": {"fixed": 0.3}}},
            "output": {"dir": "x", "format": "json"}
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        let again = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn ranges_include_the_end_point() {
        let r = Range {
            start: 0.0,
            stop: 1.2,
            step: 0.1,
        };
        let v = r.values().unwrap();
        assert_eq!(v.len(), 13);
        assert!((v[12] - 1.2).abs() < 1e-12);
        assert!(Range {
            start: 1.0,
            stop: 0.0,
            step: 0.1
        }
        .values()
        .is_err());
        assert!(Range {
            start: 0.0,
            stop: 1.0,
            step: 0.0
        }
        .values()
        .is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(
            CliError::from(Error::InvalidParameter("x".into())).exit_code(),
            1
        );
        assert_eq!(CliError::from(Error::Solver("x".into())).exit_code(), 2);
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
    }
}
