//! Executes a configuration: runs the solver for its kind, writes trace and
//! report files, and renders a one-screen summary.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure |
//! | 2 | invalid configuration |
//! | 3 | `max_iter` reached (or a resolvent hit its inner limit) |
//! | 4 | iterates diverged (non-finite value) |
//! | 5 | oracle failure |
//! | 6 | audit failure |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::operators::MonotoneOperator;
use crate::solver::{
    gradient_projection, gradient_projection_with, minimize, regularization_path_at, solve_vi, solve_zero,
    IterationTrace, SolveReport, SolveStatus, TraceOptions,
};
use crate::space::{PrimalVector, SpaceSpec};

use super::audit::{run_audit, AuditOptions};
use super::config::{parse_config, Kind, ProblemConfig, TraceFormat};
use super::emit::{emit_trace, write_file};
use super::oracle::{oracle_vi, oracle_zero, project_intersection, OracleSolution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MAX_ITER: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;
pub const EXIT_ORACLE: i32 = 5;
pub const EXIT_AUDIT: i32 = 6;

/// Gap between solver and oracle that the summary flags as acceptable.
pub const GAP_REPORT_TOL: f64 = 1e-4;
/// Distance to the oracle point counted as "reached" in comparison tables.
pub const COMPARE_TOL: f64 = 1e-3;

/// Command-line values that take precedence over the configuration file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub kind: Option<Kind>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<TraceFormat>,
    pub max_iter: Option<u64>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ProblemConfig) {
        if let Some(k) = self.kind {
            config.kind = k;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(f) = self.format {
            config.output.format = f;
        }
        if let Some(m) = self.max_iter {
            config.stop.max_iter = m;
        }
        if let Some(t) = self.tol {
            config.stop.tol_residual = t;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub summary: String,
    pub report: Value,
}

fn exit_for(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::ConvergedResidual | SolveStatus::ConvergedStep => EXIT_OK,
        SolveStatus::MaxIterReached => EXIT_MAX_ITER,
        SolveStatus::DivergedNonfinite => EXIT_DIVERGED,
    }
}

fn exit_for_error(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::OracleFailed(_) => EXIT_ORACLE,
        Error::ResolventFailed { .. } | Error::PathFailed { .. } => EXIT_MAX_ITER,
        Error::NonFinite { .. } => EXIT_DIVERGED,
        _ => EXIT_CONFIG,
    }
}

struct Table(String);

impl Table {
    fn new() -> Self {
        Table(String::new())
    }

    fn row(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key:<20}{value}");
    }
}

fn fmt_point(x: &PrimalVector) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Output locations, resolved against the `--out` directory.
struct Outputs {
    trace: Option<PathBuf>,
    report: Option<PathBuf>,
}

impl Outputs {
    fn resolve(config: &ProblemConfig, out: Option<&Path>) -> Self {
        let place = |given: &Option<PathBuf>, default: String| -> Option<PathBuf> {
            match (given, out) {
                (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
                (Some(p), _) => Some(p.clone()),
                (None, Some(dir)) => Some(dir.join(default)),
                (None, None) => None,
            }
        };
        let ext = config.output.format.extension();
        // a `.csv`/`.json` name follows the chosen format, so `--format` wins
        let trace = config.output.trace.as_ref().map(|p| match p.extension().and_then(|e| e.to_str()) {
            Some("csv" | "json") => p.with_extension(ext),
            _ => p.clone(),
        });
        Self {
            trace: place(&trace, format!("trace.{ext}")),
            report: place(&config.output.report, "report.json".into()),
        }
    }
}

/// `trace.csv` → `trace.vi.csv`.
fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn report_json(report: &SolveReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

fn oracle_json(o: &OracleSolution, gap: f64) -> Value {
    json!({
        "point": o.point,
        "method": o.method,
        "residual": o.residual,
        "certified_tol": o.certified_tol,
        "gap": gap,
    })
}

fn solve_summary(t: &mut Table, kind: Kind, report: &SolveReport) {
    t.row("kind", kind.as_str());
    t.row("status", report.status.as_str());
    t.row("iterations", report.iterations);
    t.row("final residual", format!("{:.3e}", report.final_residual));
    t.row("final point", fmt_point(&report.final_point));
    if let Some(f) = report.final_objective {
        t.row("final objective", format!("{f:.6e}"));
    }
    if let Some(f) = report.final_feasibility {
        t.row("feasibility gap", format!("{f:.3e}"));
    }
}

fn gap_row(t: &mut Table, gap: f64) {
    let verdict = if gap <= GAP_REPORT_TOL { "<=" } else { ">" };
    t.row("oracle gap", format!("{gap:.3e}  ({verdict} {GAP_REPORT_TOL:.0e})"));
}

fn region_radius(config: &ProblemConfig) -> f64 {
    let x1 = config.x1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let c = config
        .operator
        .as_ref()
        .and_then(|o| o.center.as_ref().or(o.offset.as_ref()))
        .map_or(0.0, |c| c.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    10.0 * (1.0 + x1.max(c))
}

/// Runs a validated configuration.
pub fn run(config: &ProblemConfig, out: Option<&Path>) -> RunOutcome {
    match run_inner(config, out) {
        Ok(o) => o,
        Err(e) => RunOutcome {
            exit_code: exit_for_error(&e),
            summary: format!("error: {e}\n"),
            report: json!({ "kind": config.kind.as_str(), "error": e.to_string() }),
        },
    }
}

fn run_inner(config: &ProblemConfig, out: Option<&Path>) -> Result<RunOutcome> {
    let outputs = Outputs::resolve(config, out);
    let mut t = Table::new();
    let (exit_code, mut report) = match config.kind {
        Kind::Audit => run_audit_kind(config, &mut t)?,
        Kind::ResolventPath => run_path(config, &outputs, &mut t)?,
        Kind::Compare => run_compare(config, &outputs, &mut t)?,
        _ => run_solve(config, &outputs, &mut t)?,
    };
    if let Value::Object(m) = &mut report {
        m.insert("kind".into(), json!(config.kind.as_str()));
        m.insert("exit_code".into(), json!(exit_code));
        m.insert("seed".into(), json!(config.seed));
    }
    if let Some(path) = &outputs.report {
        write_file(path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
        t.row("report", path.display());
    }
    if let Some(path) = &outputs.trace {
        if !matches!(config.kind, Kind::Audit) {
            t.row("trace", path.display());
        }
    }
    t.row("exit code", exit_code);
    Ok(RunOutcome {
        exit_code,
        summary: t.0,
        report,
    })
}

fn trace_options(config: &ProblemConfig, reference: Option<&PrimalVector>) -> TraceOptions {
    let mut opts = TraceOptions {
        stride: config.output.stride,
        record_coords: config.output.record_coords,
        reference: None,
    };
    if let Some(r) = reference {
        opts = opts.with_reference(r.clone());
    }
    opts
}

fn run_oracle(config: &ProblemConfig, op: &MonotoneOperator) -> Result<OracleSolution> {
    match config.kind {
        Kind::Vi | Kind::GradientProjection | Kind::Compare => {
            let sets = config.family.clone().unwrap_or_default();
            let w = config
                .witness
                .clone()
                .map(PrimalVector::new)
                .unwrap_or_else(|| PrimalVector::new(config.x1.clone()));
            // without an explicit witness, use the projection of x1 as one
            let w = if config.witness.is_some() {
                w
            } else {
                project_intersection(&sets, &w, 1e-13, 1_000_000)?
            };
            oracle_vi(op, &sets, &w, config.oracle.tol)
        }
        _ => oracle_zero(op, region_radius(config), config.oracle.tol, config.seed),
    }
}

/// One solve of kind zero / minimize / vi / gradient_projection.
fn solve_once(
    config: &ProblemConfig,
    kind: Kind,
    space: &SpaceSpec,
    op: &MonotoneOperator,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    let x1 = config.x1_vector();
    match kind {
        Kind::Zero => solve_zero(space, op, &x1, &config.schedule, &config.stop, opts),
        Kind::Minimize => {
            let tf = config
                .test_functional()
                .ok_or_else(|| Error::Config(vec!["minimize requires a functional".into()]))?;
            let grad = config
                .operator
                .as_ref()
                .and_then(|o| o.analytic)
                .unwrap_or(true)
                .then(|| tf.grad.clone());
            minimize(space, tf.f, grad, &x1, &config.schedule, &config.stop, opts)
        }
        Kind::Vi => {
            let family = config.cyclic_family()?;
            solve_vi(space, op, &family, &x1, &config.schedule, &config.stop, opts)
        }
        Kind::GradientProjection => {
            let sets = config
                .family
                .clone()
                .ok_or_else(|| Error::Config(vec!["gradient_projection requires a family".into()]))?;
            let step = config.gp.step;
            let steps = move |_: u64| step;
            if sets.len() == 1 {
                gradient_projection(space, op, &sets[0], &x1, &steps, &config.stop, opts)
            } else {
                let project = |x: &PrimalVector| project_intersection(&sets, x, 1e-13, 1_000_000).unwrap_or_else(|_| x.clone());
                gradient_projection_with(space, op, &project, &x1, &steps, &config.stop, opts)
            }
        }
        other => Err(Error::Config(vec![format!("kind `{}` is not a single solve", other.as_str())])),
    }
}

fn run_solve(config: &ProblemConfig, outputs: &Outputs, t: &mut Table) -> Result<(i32, Value)> {
    let space = config.space_spec()?;
    let op = config.build_operator()?;
    let oracle = if config.oracle.enabled {
        match run_oracle(config, &op) {
            Ok(o) => Some(o),
            Err(e) => {
                t.row("kind", config.kind.as_str());
                t.row("oracle", format!("failed: {e}"));
                return Ok((EXIT_ORACLE, json!({ "oracle_error": e.to_string() })));
            }
        }
    } else {
        None
    };
    let opts = trace_options(config, oracle.as_ref().map(|o| &o.point));
    let (report, trace) = solve_once(config, config.kind, &space, &op, &opts)?;
    if let Some(path) = &outputs.trace {
        emit_trace(&trace, config.output.format, path)?;
    }
    solve_summary(t, config.kind, &report);
    let mut value = json!({ "report": report_json(&report) });
    if let Some(o) = &oracle {
        let gap = space.norm(&report.final_point.sub(&o.point))?;
        gap_row(t, gap);
        value["oracle"] = oracle_json(o, gap);
    }
    Ok((exit_for(report.status), value))
}

fn run_compare(config: &ProblemConfig, outputs: &Outputs, t: &mut Table) -> Result<(i32, Value)> {
    let space = config.space_spec()?;
    let op = config.build_operator()?;
    let oracle = match run_oracle(config, &op) {
        Ok(o) => o,
        Err(e) => {
            t.row("kind", "compare");
            t.row("oracle", format!("failed: {e}"));
            return Ok((EXIT_ORACLE, json!({ "oracle_error": e.to_string() })));
        }
    };
    let mut opts = trace_options(config, Some(&oracle.point));
    opts.record_coords = true;

    let mut rows = Vec::new();
    let mut worst_exit = EXIT_OK;
    let _ = writeln!(
        t.0,
        "{:<22}{:<22}{:>12}{:>14}{:>20}",
        "method", "status", "iterations", "oracle gap", "first n within 1e-3"
    );
    for (kind, tag) in [(Kind::Vi, "vi"), (Kind::GradientProjection, "gp")] {
        let (report, trace) = solve_once(config, kind, &space, &op, &opts)?;
        if let Some(path) = &outputs.trace {
            emit_trace(&trace, config.output.format, &suffixed(path, tag))?;
        }
        let gap = space.norm(&report.final_point.sub(&oracle.point))?;
        let reached = trace.rows.iter().find_map(|r| {
            let x = PrimalVector::new(r.coords.clone()?);
            (space.norm(&x.sub(&oracle.point)).ok()? <= COMPARE_TOL).then_some(r.n)
        });
        let reached_s = reached.map_or_else(|| "-".to_string(), |n| n.to_string());
        let _ = writeln!(
            t.0,
            "{:<22}{:<22}{:>12}{:>14}{:>20}",
            kind.as_str(),
            report.status.as_str(),
            report.iterations,
            format!("{gap:.3e}"),
            reached_s
        );
        worst_exit = worst_exit.max(exit_for(report.status));
        rows.push(json!({
            "method": kind.as_str(),
            "report": report_json(&report),
            "oracle_gap": gap,
            "first_n_within_tol": reached,
        }));
    }
    t.row("oracle point", fmt_point(&oracle.point));
    Ok((worst_exit, json!({ "oracle": oracle_json(&oracle, 0.0), "compare": rows, "compare_tol": COMPARE_TOL })))
}

fn path_to_csv(points: &[crate::solver::PathPoint]) -> String {
    let n = points.first().map_or(0, |p| p.y.len());
    let mut out = String::from("n,theta,resolvent_residual,inner_iterations,stationarity_residual,step_bound_lhs,step_bound_rhs");
    for i in 1..=n {
        let _ = write!(out, ",y_{i}");
    }
    out.push('\n');
    for p in points {
        let (lhs, rhs) = p
            .step_bound
            .map_or((String::new(), String::new()), |e| (format!("{:.16e}", e.lhs), format!("{:.16e}", e.rhs)));
        let _ = write!(
            out,
            "{},{:.16e},{:.16e},{},{:.16e},{},{}",
            p.n, p.theta, p.resolvent_residual, p.inner_iterations, p.stationarity_residual, lhs, rhs
        );
        for v in p.y.iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

fn run_path(config: &ProblemConfig, outputs: &Outputs, t: &mut Table) -> Result<(i32, Value)> {
    let space = config.space_spec()?;
    let op = config.build_operator()?;
    let indices = config.path.resolved_indices();
    let points = regularization_path_at(
        &space,
        &op,
        &config.x1_vector(),
        &config.schedule,
        &indices,
        config.path.inner_tol,
        config.path.inner_max,
    )?;
    if let Some(path) = &outputs.trace {
        let text = match config.output.format {
            TraceFormat::Csv => path_to_csv(&points),
            TraceFormat::Json => serde_json::to_string_pretty(&path_json(&points)).expect("serializes") + "\n",
        };
        write_file(path, &text)?;
    }
    t.row("kind", "resolvent_path");
    let _ = writeln!(
        t.0,
        "{:>10}{:>14}{:>14}{:>14}{:>14}{:>14}",
        "n", "theta", "|y_n|", "resolvent resid", "stationarity resid", "ratio slack"
    );
    for p in &points {
        let slack = p.step_bound.map_or("-".to_string(), |e| format!("{:.3e}", e.rhs - e.lhs));
        let _ = writeln!(
            t.0,
            "{:>10}{:>14.6e}{:>14.6e}{:>14.3e}{:>14.3e}{:>14}",
            p.n,
            p.theta,
            space.norm(&p.y)?,
            p.resolvent_residual,
            p.stationarity_residual,
            slack
        );
    }
    Ok((EXIT_OK, json!({ "path": path_json(&points) })))
}

fn path_json(points: &[crate::solver::PathPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| {
                let mut v = json!({
                    "n": p.n,
                    "theta": p.theta,
                    "y": p.y,
                    "resolvent_residual": p.resolvent_residual,
                    "inner_iterations": p.inner_iterations,
                    "stationarity_residual": p.stationarity_residual,
                });
                if let Some(e) = p.step_bound {
                    v["step_bound_lhs"] = json!(e.lhs);
                    v["step_bound_rhs"] = json!(e.rhs);
                }
                v
            })
            .collect(),
    )
}

fn run_audit_kind(config: &ProblemConfig, t: &mut Table) -> Result<(i32, Value)> {
    let lines = run_audit(&AuditOptions {
        seed: config.seed,
        ..AuditOptions::default()
    })?;
    for l in &lines {
        let _ = writeln!(t.0, "{}", l.render());
    }
    let pass = lines.iter().all(|l| l.pass);
    Ok((if pass { EXIT_OK } else { EXIT_AUDIT }, json!({ "audit": lines })))
}

/// The configuration used by `check` when no file is given.
pub fn default_audit_config() -> ProblemConfig {
    parse_config(r#"{"kind": "audit", "space": {"n": 1}}"#).expect("built-in config is valid")
}

/// Loads, overrides, re-validates and runs a configuration file.
pub fn run_file(path: Option<&Path>, overrides: &Overrides) -> RunOutcome {
    let loaded = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })
            .and_then(|text| parse_config(&text)),
        None if overrides.kind == Some(Kind::Audit) => Ok(default_audit_config()),
        None => Err(Error::Config(vec!["--config is required for this command".into()])),
    };
    let mut config = match loaded {
        Ok(c) => c,
        Err(e) => {
            return RunOutcome {
                exit_code: exit_for_error(&e),
                summary: format!("error: {e}\n"),
                report: json!({ "error": e.to_string() }),
            }
        }
    };
    overrides.apply(&mut config);
    let problems = config.violations();
    if !problems.is_empty() {
        let e = Error::Config(problems);
        return RunOutcome {
            exit_code: EXIT_CONFIG,
            summary: format!("error: {e}\n"),
            report: json!({ "error": e.to_string() }),
        };
    }
    run(&config, overrides.out.as_deref())
}
