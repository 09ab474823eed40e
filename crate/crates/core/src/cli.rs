//! JSON-configured front end: config schema, command dispatch, and the CSV /
//! JSON writers for curves, events, profiles and the logistic envelope.
//!
//! Config layout (all numeric settings optional unless a command needs them):
//!
//! ```json
//! {
//!   "problem": { "f": [0, 10, -2], "g": [1, 0, 0.2] },
//!   "newton": { "tol_residual": 1e-10, "max_iters": 50, "steps": 2048 },
//!   "continuation": { "alpha_step": 0.01, "stop_on_positivity_loss": false },
//!   "runs": [
//!     { "name": "mu_1.5", "mu": 1.5, "lambda_init": 0.66,
//!       "alpha_start": 0.5, "alpha_end": 4.8 }
//!   ],
//!   "envelope": { "alpha_start": 0.01, "alpha_end": 0.70, "alpha_step": 0.01 }
//! }
//! ```
//!
//! `lambda-curve` runs need `mu` and `lambda_init`; `mu-curve` runs need
//! `lambda` and `mu_init`.

use crate::curve::{trace, ContinuationConfig, Curve, CurveEvent, CurveKind};
use crate::error::{CurveError, LogisticError};
use crate::logistic::{self, EnvelopePoint};
use crate::model::{validate_problem, Polynomial, ProblemSpec, ValidationReport, DEFAULT_GRID_SIZE};
use crate::shoot::NewtonConfig;
use crate::verify::{self, PropertyResult};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CURVE_CSV_HEADER: &str = "alpha,lambda,mu,uprime1,min_u,positive,residual,iters";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    LambdaCurve,
    MuCurve,
    Envelope,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::LambdaCurve => "lambda-curve",
            Command::MuCurve => "mu-curve",
            Command::Envelope => "envelope",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("problem failed validation:\n{0}")]
    Validation(ValidationReport),
    #[error("solver failure in run '{run}': {source}")]
    Solver { run: String, source: CurveError },
    #[error("envelope: {0}")]
    Envelope(#[from] LogisticError),
    #[error("{failed} of {} properties failed", properties.len())]
    Verification {
        failed: usize,
        properties: Vec<PropertyResult>,
    },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 0 success, 2 config, 3 solver, 4 validation/verification, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver { .. } | CliError::Envelope(_) => 3,
            CliError::Validation(_) | CliError::Verification { .. } => 4,
            CliError::Io { .. } => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationSettings {
    pub alpha_step: f64,
    pub max_step_halvings: u32,
    pub keep_profiles: bool,
    pub stop_on_positivity_loss: bool,
    pub jump_guard: f64,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        let d = ContinuationConfig::default();
        Self {
            alpha_step: d.alpha_step,
            max_step_halvings: d.max_step_halvings,
            keep_profiles: d.keep_profiles,
            stop_on_positivity_loss: d.stop_on_positivity_loss,
            jump_guard: d.jump_guard,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub name: Option<String>,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_init: Option<f64>,
    pub mu_init: Option<f64>,
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub alpha_step: Option<f64>,
    pub keep_profiles: Option<bool>,
    pub stop_on_positivity_loss: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSettings {
    pub alphas: Option<Vec<f64>>,
    pub alpha_start: Option<f64>,
    pub alpha_end: Option<f64>,
    pub alpha_step: Option<f64>,
    pub panels: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub newton: NewtonConfig,
    #[serde(default)]
    pub continuation: ContinuationSettings,
    #[serde(default)]
    pub runs: Vec<RunSpec>,
    pub envelope: Option<EnvelopeSettings>,
    pub grid_size: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub alpha_step: Option<f64>,
    pub steps: Option<usize>,
    pub quiet: bool,
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    check_finite(&cfg)?;
    Ok(cfg)
}

fn check_finite(cfg: &RunConfig) -> Result<(), CliError> {
    let mut values: Vec<(&str, f64)> = vec![
        ("newton.tol_residual", cfg.newton.tol_residual),
        ("newton.min_derivative", cfg.newton.min_derivative),
        ("continuation.alpha_step", cfg.continuation.alpha_step),
        ("continuation.jump_guard", cfg.continuation.jump_guard),
    ];
    if let Some(p) = &cfg.problem {
        values.extend(p.f.iter().map(|&v| ("problem.f", v)));
        values.extend(p.g.iter().map(|&v| ("problem.g", v)));
    }
    for r in &cfg.runs {
        values.push(("runs.alpha_start", r.alpha_start));
        values.push(("runs.alpha_end", r.alpha_end));
        for (k, v) in [
            ("runs.mu", r.mu),
            ("runs.lambda", r.lambda),
            ("runs.lambda_init", r.lambda_init),
            ("runs.mu_init", r.mu_init),
            ("runs.alpha_step", r.alpha_step),
        ] {
            if let Some(v) = v {
                values.push((k, v));
            }
        }
    }
    if let Some((k, _)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(CliError::Config(format!("{k} must be finite")));
    }
    if !(cfg.newton.tol_residual > 0.0) || cfg.newton.max_iters == 0 {
        return Err(CliError::Config(
            "newton.tol_residual must be > 0 and newton.max_iters >= 1".into(),
        ));
    }
    Ok(())
}

fn validated_problem(cfg: &RunConfig) -> Result<(ProblemSpec, ValidationReport), CliError> {
    let p = cfg
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Config("missing field `problem`".into()))?;
    let mut spec = ProblemSpec::new(Polynomial::from(p.f.clone()), Polynomial::from(p.g.clone()));
    let report = validate_problem(&mut spec, cfg.grid_size.unwrap_or(DEFAULT_GRID_SIZE));
    Ok((spec, report))
}

/// A fully resolved curve job.
#[derive(Debug, Clone)]
pub struct CurveJob {
    pub name: String,
    pub kind: CurveKind,
    pub fixed: f64,
    pub init: f64,
    pub cfg: ContinuationConfig,
}

pub fn curve_jobs(cfg: &RunConfig, kind: CurveKind, ov: &Overrides) -> Result<Vec<CurveJob>, CliError> {
    if cfg.runs.is_empty() {
        return Err(CliError::Config("no `runs` given".into()));
    }
    let mut newton = cfg.newton;
    if let Some(steps) = ov.steps {
        newton.steps = steps;
    }
    let (fixed_key, init_key) = match kind {
        CurveKind::LambdaCurve => ("mu", "lambda_init"),
        CurveKind::MuCurve => ("lambda", "mu_init"),
    };
    let mut seen = std::collections::HashSet::new();
    cfg.runs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (fixed, init) = match kind {
                CurveKind::LambdaCurve => (r.mu, r.lambda_init),
                CurveKind::MuCurve => (r.lambda, r.mu_init),
            };
            let missing = |k: &str| CliError::Config(format!("runs[{i}]: missing field `{k}`"));
            let fixed = fixed.ok_or_else(|| missing(fixed_key))?;
            let init = init.ok_or_else(|| missing(init_key))?;
            let name = r
                .name
                .clone()
                .unwrap_or_else(|| format!("{}_{fixed}", fixed_key));
            if !seen.insert(name.clone()) {
                return Err(CliError::Config(format!("duplicate run name `{name}`")));
            }
            let c = &cfg.continuation;
            let step = ov.alpha_step.or(r.alpha_step).unwrap_or(c.alpha_step);
            let curve_cfg = ContinuationConfig {
                alpha_start: r.alpha_start,
                alpha_end: r.alpha_end,
                alpha_step: step,
                newton,
                max_step_halvings: c.max_step_halvings,
                keep_profiles: r.keep_profiles.unwrap_or(c.keep_profiles),
                stop_on_positivity_loss: r
                    .stop_on_positivity_loss
                    .unwrap_or(c.stop_on_positivity_loss),
                jump_guard: c.jump_guard,
            };
            if r.alpha_start == r.alpha_end || step == 0.0 {
                return Err(CliError::Config(format!(
                    "runs[{i}]: alpha range is empty or alpha_step is zero"
                )));
            }
            Ok(CurveJob {
                name,
                kind,
                fixed,
                init,
                cfg: curve_cfg,
            })
        })
        .collect()
}

/// Traces every job, in parallel; results keep job order.
pub fn run_jobs(spec: &ProblemSpec, jobs: &[CurveJob]) -> Vec<Result<Curve, CurveError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|j| s.spawn(move || trace(spec, j.kind, j.fixed, j.init, &j.cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trace thread panicked"))
            .collect()
    })
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Curve points as CSV text, rows by increasing `alpha`.
pub fn curve_csv(curve: &Curve) -> String {
    let mut out = String::with_capacity(64 * (curve.points.len() + 1));
    out.push_str(CURVE_CSV_HEADER);
    out.push('\n');
    let mut pts: Vec<_> = curve.points.iter().collect();
    pts.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    for p in pts {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(p.alpha),
            fmt_f64(p.lambda),
            fmt_f64(p.mu),
            fmt_f64(p.up1),
            fmt_f64(p.min_u),
            p.positive,
            fmt_f64(p.residual),
            p.iters
        );
    }
    out
}

pub fn events_json(events: &[CurveEvent]) -> String {
    serde_json::to_string_pretty(events).expect("events serialize")
}

fn events_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".events.json");
    PathBuf::from(s)
}

/// Writes the curve CSV at `path` and its events at `<path>.events.json`.
pub fn write_curve_csv(curve: &Curve, path: &Path) -> Result<(), CliError> {
    if curve.points.is_empty() {
        return Err(CliError::Config("refusing to write an empty curve".into()));
    }
    fs::write(path, curve_csv(curve)).map_err(io_err(path))?;
    let ev = events_path(path);
    fs::write(&ev, events_json(&curve.events) + "\n").map_err(io_err(&ev))?;
    Ok(())
}

/// One parsed row of a curve CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub uprime1: f64,
    pub min_u: f64,
    pub positive: bool,
    pub residual: f64,
    pub iters: usize,
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CURVE_CSV_HEADER => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(format!("row {i}: expected 8 columns, got {}", cols.len()));
            }
            let num = |k: usize| {
                cols[k]
                    .parse::<f64>()
                    .map_err(|e| format!("row {i} col {k}: {e}"))
            };
            Ok(CurveRow {
                alpha: num(0)?,
                lambda: num(1)?,
                mu: num(2)?,
                uprime1: num(3)?,
                min_u: num(4)?,
                positive: cols[5].parse().map_err(|e| format!("row {i}: {e}"))?,
                residual: num(6)?,
                iters: cols[7].parse().map_err(|e| format!("row {i}: {e}"))?,
            })
        })
        .collect()
}

/// Full-interval profiles of every point that kept one: `alpha,x,u,uprime`.
pub fn profiles_csv(curve: &Curve) -> Option<String> {
    let mut out = String::from("alpha,x,u,uprime\n");
    let mut any = false;
    for p in &curve.points {
        if let Some(traj) = &p.profile {
            any = true;
            for (x, u, up) in traj.reflected_profile() {
                let _ = writeln!(out, "{},{},{},{}", fmt_f64(p.alpha), fmt_f64(x), fmt_f64(u), fmt_f64(up));
            }
        }
    }
    any.then_some(out)
}

pub fn envelope_csv(points: &[EnvelopePoint]) -> String {
    let mut out = String::from("alpha,lambda_bar,mu_bar\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", fmt_f64(p.alpha), fmt_f64(p.lambda_bar), fmt_f64(p.mu_bar));
    }
    out
}

pub fn envelope_grid(s: &EnvelopeSettings) -> Result<Vec<f64>, CliError> {
    if let Some(a) = &s.alphas {
        return Ok(a.clone());
    }
    let start = s.alpha_start.unwrap_or(0.01);
    let end = s.alpha_end.unwrap_or(0.70);
    let step = s.alpha_step.unwrap_or(0.01);
    if !(step > 0.0) || end < start || ![start, end, step].iter().all(|v| v.is_finite()) {
        return Err(CliError::Config("envelope: need alpha_start <= alpha_end and alpha_step > 0".into()));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Serialize)]
struct RunEvents<'a> {
    run: &'a str,
    kind: CurveKind,
    fixed_value: f64,
    events: &'a [CurveEvent],
}

/// What a command produced, for the caller to report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub messages: Vec<String>,
    pub properties: Vec<PropertyResult>,
}

pub fn run(command: Command, config_path: &Path, ov: &Overrides) -> Result<Outcome, CliError> {
    let cfg = load_config(config_path)?;
    run_config(command, &cfg, ov)
}

pub fn run_config(command: Command, cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    if let Some(c) = &cfg.command {
        if c != command.name() {
            return Err(CliError::Config(format!(
                "config is for command `{c}`, invoked as `{}`",
                command.name()
            )));
        }
    }
    let out_dir = ov
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let mut outcome = Outcome::default();

    match command {
        Command::Validate => {
            let (_, report) = validated_problem(cfg)?;
            if !report.passed() {
                return Err(CliError::Validation(report));
            }
            outcome.messages.push(report.to_string());
        }
        Command::LambdaCurve | Command::MuCurve => {
            let kind = if command == Command::LambdaCurve {
                CurveKind::LambdaCurve
            } else {
                CurveKind::MuCurve
            };
            let (spec, report) = validated_problem(cfg)?;
            if !report.passed() {
                return Err(CliError::Validation(report));
            }
            let jobs = curve_jobs(cfg, kind, ov)?;
            let results = run_jobs(&spec, &jobs);
            fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
            let mut curves = Vec::with_capacity(jobs.len());
            for (job, res) in jobs.iter().zip(results) {
                let curve = res.map_err(|source| CliError::Solver {
                    run: job.name.clone(),
                    source,
                })?;
                let path = out_dir.join(format!("{}.csv", job.name));
                write_curve_csv(&curve, &path)?;
                outcome.written.push(path.clone());
                outcome.written.push(events_path(&path));
                if let Some(text) = profiles_csv(&curve) {
                    let p = out_dir.join(format!("{}.profiles.csv", job.name));
                    fs::write(&p, text).map_err(io_err(&p))?;
                    outcome.written.push(p);
                }
                outcome.messages.push(format!(
                    "{}: {} points, {} events",
                    job.name,
                    curve.points.len(),
                    curve.events.len()
                ));
                curves.push(curve);
            }
            let summary: Vec<RunEvents> = jobs
                .iter()
                .zip(&curves)
                .map(|(j, c)| RunEvents {
                    run: &j.name,
                    kind: c.kind,
                    fixed_value: c.fixed_value,
                    events: &c.events,
                })
                .collect();
            let p = out_dir.join(format!("{}.events.json", command.name()));
            let text = serde_json::to_string_pretty(&summary).expect("events serialize") + "\n";
            fs::write(&p, text).map_err(io_err(&p))?;
            outcome.written.push(p);
        }
        Command::Envelope => {
            let settings = cfg.envelope.clone().unwrap_or(EnvelopeSettings {
                alphas: None,
                alpha_start: None,
                alpha_end: None,
                alpha_step: None,
                panels: None,
            });
            let grid = envelope_grid(&settings)?;
            let panels = settings.panels.unwrap_or(logistic::DEFAULT_PANELS);
            if let Some(a) = grid.iter().find(|&&a| a > 0.73 && a < 0.75) {
                outcome.messages.push(format!(
                    "warning: alpha = {a} is within 0.02 of 3/4; quadrature accuracy degrades there"
                ));
            }
            let env = logistic::envelope(&grid, panels)?;
            fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
            let p = out_dir.join("envelope.csv");
            fs::write(&p, envelope_csv(&env)).map_err(io_err(&p))?;
            outcome.written.push(p);
        }
        Command::Verify => {
            if cfg.problem.is_some() {
                let (_, report) = validated_problem(cfg)?;
                outcome.properties.push(PropertyResult {
                    name: "config problem satisfies structural conditions".into(),
                    passed: report.passed(),
                    detail: report.to_string().trim_end().replace('\n', "; "),
                });
            }
            let mut newton = cfg.newton;
            if let Some(steps) = ov.steps {
                newton.steps = steps;
            }
            outcome.properties.extend(verify::run_suite(&newton));
            let failed = outcome.properties.iter().filter(|p| !p.passed).count();
            if failed > 0 {
                return Err(CliError::Verification {
                    failed,
                    properties: outcome.properties,
                });
            }
        }
    }
    Ok(outcome)
}
