//! Trace files. Reals are written as `{:.16e}` (17 significant digits),
//! which round-trips every finite `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::IterationTrace;

use super::config::TraceFormat;

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_real(v: f64) -> String {
    if v.is_finite() {
        real(v)
    } else {
        "null".into()
    }
}

fn coord_count(trace: &IterationTrace) -> usize {
    trace
        .rows
        .iter()
        .filter_map(|r| r.coords.as_ref().map(Vec::len))
        .max()
        .unwrap_or(0)
}

pub fn trace_to_csv(trace: &IterationTrace) -> String {
    let k = coord_count(trace);
    let mut out = String::from("n,lambda,theta,residual_dual,step_norm,phi_to_ref");
    for i in 1..=k {
        let _ = write!(out, ",x_{i}");
    }
    out.push('\n');
    for r in &trace.rows {
        let phi = r.phi_to_ref.map(real).unwrap_or_default();
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            real(r.lambda),
            real(r.theta),
            real(r.residual_dual),
            real(r.step_norm),
            phi
        );
        if let Some(c) = &r.coords {
            for v in c {
                let _ = write!(out, ",{}", real(*v));
            }
        }
        out.push('\n');
    }
    out
}

pub fn trace_to_json(trace: &IterationTrace) -> String {
    let mut out = String::from("[");
    for (i, r) in trace.rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
        let _ = write!(
            out,
            "\"n\": {}, \"lambda\": {}, \"theta\": {}, \"residual_dual\": {}, \"step_norm\": {}",
            r.n,
            json_real(r.lambda),
            json_real(r.theta),
            json_real(r.residual_dual),
            json_real(r.step_norm)
        );
        if let Some(phi) = r.phi_to_ref {
            let _ = write!(out, ", \"phi_to_ref\": {}", json_real(phi));
        }
        if let Some(c) = &r.coords {
            for (j, v) in c.iter().enumerate() {
                let _ = write!(out, ", \"x_{}\": {}", j + 1, json_real(*v));
            }
        }
        out.push('}');
    }
    out.push_str(if trace.rows.is_empty() { "]\n" } else { "\n]\n" });
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `trace` to `path` as CSV or a JSON array of row objects.
pub fn emit_trace(trace: &IterationTrace, format: TraceFormat, path: &Path) -> Result<()> {
    let text = match format {
        TraceFormat::Csv => trace_to_csv(trace),
        TraceFormat::Json => trace_to_json(trace),
    };
    write_file(path, &text)
}
