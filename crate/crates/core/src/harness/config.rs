//! JSON problem configuration with strict key checking.
//!
//! Parsing collects every violation it can find (unknown keys, type errors
//! per section, semantic problems) before failing, so a broken file can be
//! fixed in one pass.

use std::path::PathBuf;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::operators::{gradient_of, linear_map, power_map, MonotoneOperator, TestFunctional};
use crate::projections::{ConvexSet, CyclicFamily};
use crate::schedules::PowerSchedule;
use crate::solver::{StopRule, TraceStride};
use crate::space::{DualCovector, PrimalVector, SpaceSpec};

/// Horizon used when validating the schedule of a configuration.
pub const SCHEDULE_HORIZON: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Zero,
    Minimize,
    Vi,
    ResolventPath,
    GradientProjection,
    Compare,
    Audit,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Zero => "zero",
            Kind::Minimize => "minimize",
            Kind::Vi => "vi",
            Kind::ResolventPath => "resolvent_path",
            Kind::GradientProjection => "gradient_projection",
            Kind::Compare => "compare",
            Kind::Audit => "audit",
        }
    }

    fn needs_operator(&self) -> bool {
        !matches!(self, Kind::Audit)
    }

    fn needs_family(&self) -> bool {
        matches!(self, Kind::Vi | Kind::GradientProjection | Kind::Compare)
    }

    fn needs_hilbert(&self) -> bool {
        matches!(self, Kind::GradientProjection | Kind::Compare)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub n: usize,
    #[serde(default = "two")]
    pub s: f64,
    #[serde(default = "two")]
    pub p: f64,
}

fn two() -> f64 {
    2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `T x = ‖x‖₂^{p−2} x`.
    Power,
    /// `T x = G x − offset`.
    Linear,
    /// Gradient of a test functional.
    Gradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    /// `½‖x − c‖²`.
    Quadratic,
    /// `¼Σ(x_i − c_i)⁴ + ½‖x − c‖²`.
    Quartic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub builtin: Builtin,
    /// Row-major `n × n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    /// Use the analytic gradient (default) rather than central differences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
}

fn default_oracle_tol() -> f64 {
    1e-10
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            enabled: false,
            tol: default_oracle_tol(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

impl TraceFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            TraceFormat::Csv => "csv",
            TraceFormat::Json => "json",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub record_coords: bool,
    #[serde(default)]
    pub format: TraceFormat,
    #[serde(default)]
    pub stride: TraceStride,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    /// Path indices `1..=m`; ignored when `indices` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<u64>>,
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    #[serde(default = "default_inner_max")]
    pub inner_max: usize,
}

fn default_inner_tol() -> f64 {
    1e-10
}

fn default_inner_max() -> usize {
    100_000
}

impl Default for PathSection {
    fn default() -> Self {
        Self {
            m: None,
            indices: None,
            inner_tol: default_inner_tol(),
            inner_max: default_inner_max(),
        }
    }
}

impl PathSection {
    pub fn resolved_indices(&self) -> Vec<u64> {
        match (&self.indices, self.m) {
            (Some(ix), _) => ix.clone(),
            (None, Some(m)) => (1..=m).collect(),
            (None, None) => (0..6).map(|k| 10u64.pow(k)).collect(),
        }
    }
}

/// Constant step size of the projected-gradient baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpSection {
    #[serde(default = "default_gp_step")]
    pub step: f64,
}

fn default_gp_step() -> f64 {
    0.5
}

impl Default for GpSection {
    fn default() -> Self {
        Self { step: default_gp_step() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub kind: Kind,
    pub space: SpaceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    /// Starting point and anchor; all ones by default.
    pub x1: Vec<f64>,
    pub schedule: PowerSchedule,
    pub stop: StopRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<ConvexSet>>,
    /// A point known to lie in every set of the family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    pub oracle: OracleSection,
    pub output: OutputSection,
    pub path: PathSection,
    pub gp: GpSection,
    pub seed: u64,
}

const TOP_KEYS: &[&str] = &[
    "kind", "space", "operator", "x1", "schedule", "stop", "family", "witness", "oracle", "output", "path", "gp",
    "seed",
];

fn section_keys(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "space" => &["n", "s", "p"],
        "operator" => &["builtin", "matrix", "offset", "functional", "center", "analytic"],
        "schedule" => &["lambda0", "a", "theta0", "b"],
        "stop" => &["tol_residual", "tol_step", "max_iter"],
        "oracle" => &["enabled", "tol"],
        "output" => &["trace", "report", "record_coords", "format", "stride"],
        "path" => &["m", "indices", "inner_tol", "inner_max"],
        "gp" => &["step"],
        _ => return None,
    })
}

fn set_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "box" => &["kind", "lo", "hi"],
        "ball" => &["kind", "center", "radius"],
        "halfspace" => &["kind", "normal", "offset"],
        _ => return None,
    })
}

fn unknown_keys(obj: &Map<String, Value>, allowed: &[&str], at: &str, out: &mut Vec<String>) -> bool {
    let mut clean = true;
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            out.push(format!("{at}: unknown key `{k}`"));
            clean = false;
        }
    }
    clean
}

/// Structural pass: unknown keys at every level. Returns the sections whose
/// keys are all known, so typed decoding is only attempted on those.
fn check_keys(root: &Map<String, Value>, out: &mut Vec<String>) -> Vec<String> {
    unknown_keys(root, TOP_KEYS, "top level", out);
    let mut clean = Vec::new();
    for (name, value) in root {
        let ok = match (name.as_str(), value) {
            ("family", Value::Array(items)) => {
                let mut ok = true;
                for (i, item) in items.iter().enumerate() {
                    let at = format!("family[{i}]");
                    let Some(obj) = item.as_object() else {
                        out.push(format!("{at}: expected an object"));
                        ok = false;
                        continue;
                    };
                    match obj.get("kind").and_then(Value::as_str) {
                        Some(kind) => match set_keys(kind) {
                            Some(keys) => ok &= unknown_keys(obj, keys, &at, out),
                            None => {
                                out.push(format!("{at}: unknown set kind `{kind}` (expected box, ball or halfspace)"));
                                ok = false;
                            }
                        },
                        None => {
                            out.push(format!("{at}: missing string key `kind`"));
                            ok = false;
                        }
                    }
                }
                ok
            }
            ("output", Value::Object(obj)) => {
                let mut ok = unknown_keys(obj, section_keys("output").unwrap_or(&[]), "output", out);
                if let Some(Value::Object(stride)) = obj.get("stride") {
                    ok &= unknown_keys(stride, &["every", "until", "then_every"], "output.stride", out);
                }
                ok
            }
            (section, Value::Object(obj)) => match section_keys(section) {
                Some(keys) => unknown_keys(obj, keys, section, out),
                None => true,
            },
            _ => true,
        };
        if ok {
            clean.push(name.clone());
        }
    }
    clean
}

fn decode<T: DeserializeOwned>(root: &Map<String, Value>, key: &str, clean: &[String], out: &mut Vec<String>) -> Option<T> {
    let v = root.get(key)?;
    if !clean.iter().any(|c| c == key) {
        return None;
    }
    match serde_json::from_value::<T>(v.clone()) {
        Ok(t) => Some(t),
        Err(e) => {
            out.push(format!("{key}: {e}"));
            None
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ProblemConfig> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("malformed JSON: {e}")]))?;
    let Value::Object(root) = root else {
        return Err(Error::Config(vec!["top level must be a JSON object".into()]));
    };
    let mut errs = Vec::new();
    let clean = check_keys(&root, &mut errs);

    let kind: Option<Kind> = decode(&root, "kind", &clean, &mut errs);
    if !root.contains_key("kind") {
        errs.push("missing required key `kind`".into());
    }
    let space: Option<SpaceSection> = decode(&root, "space", &clean, &mut errs);
    if !root.contains_key("space") {
        errs.push("missing required section `space`".into());
    }
    let operator: Option<OperatorSpec> = decode(&root, "operator", &clean, &mut errs);
    let x1: Option<Vec<f64>> = decode(&root, "x1", &clean, &mut errs);
    let schedule: Option<PowerSchedule> = decode(&root, "schedule", &clean, &mut errs);
    let stop: Option<StopRule> = decode::<StopSection>(&root, "stop", &clean, &mut errs).map(Into::into);
    let family: Option<Vec<ConvexSet>> = decode(&root, "family", &clean, &mut errs);
    let witness: Option<Vec<f64>> = decode(&root, "witness", &clean, &mut errs);
    let oracle: Option<OracleSection> = decode(&root, "oracle", &clean, &mut errs);
    let output: Option<OutputSection> = decode(&root, "output", &clean, &mut errs);
    let path: Option<PathSection> = decode(&root, "path", &clean, &mut errs);
    let gp: Option<GpSection> = decode(&root, "gp", &clean, &mut errs);
    let seed: Option<u64> = decode(&root, "seed", &clean, &mut errs);

    // Sections that failed to decode are already reported; stop before
    // semantic checks that would only echo them.
    let (Some(kind), Some(space)) = (kind, space) else {
        return Err(Error::Config(errs));
    };
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let config = ProblemConfig {
        kind,
        space,
        operator,
        x1: x1.unwrap_or_else(|| vec![1.0; space.n]),
        schedule: schedule.unwrap_or_default(),
        stop: stop.unwrap_or_default(),
        family,
        witness,
        oracle: oracle.unwrap_or_default(),
        output: output.unwrap_or_default(),
        path: path.unwrap_or_default(),
        gp: gp.unwrap_or_default(),
        seed: seed.unwrap_or(0),
    };
    let problems = config.violations();
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(Error::Config(problems))
    }
}

/// `stop` section with per-field defaults.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StopSection {
    #[serde(default = "default_tol_residual")]
    tol_residual: f64,
    #[serde(default)]
    tol_step: f64,
    #[serde(default = "default_max_iter")]
    max_iter: u64,
}

fn default_tol_residual() -> f64 {
    StopRule::default().tol_residual
}

fn default_max_iter() -> u64 {
    StopRule::default().max_iter
}

impl From<StopSection> for StopRule {
    fn from(s: StopSection) -> Self {
        StopRule {
            tol_residual: s.tol_residual,
            tol_step: s.tol_step,
            max_iter: s.max_iter,
        }
    }
}

fn check_len(what: &str, len: usize, n: usize, out: &mut Vec<String>) {
    if len != n {
        out.push(format!("{what}: expected {n} entries, found {len}"));
    }
}

impl ProblemConfig {
    /// Every semantic problem with the configuration.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.space.n;
        let space = match SpaceSpec::new(n, self.space.s, self.space.p) {
            Ok(s) => Some(s),
            Err(e) => {
                out.push(format!("space: {e}"));
                None
            }
        };

        let sched = self.schedule.violations();
        for e in &sched {
            out.push(format!("schedule: {e}"));
        }
        if sched.is_empty() {
            match self.schedule.validate(SCHEDULE_HORIZON) {
                Ok(report) => {
                    for v in [&report.theta_decreasing, &report.divergent_sum, &report.ratio_limit] {
                        if !v.pass {
                            out.push(format!("schedule: condition {} fails: {}", v.condition, v.formula));
                        }
                    }
                }
                Err(e) => out.push(format!("schedule: {e}")),
            }
        }
        if let Err(e) = self.stop.validate() {
            out.push(format!("stop: {e}"));
        }
        check_len("x1", self.x1.len(), n, &mut out);
        if self.x1.iter().any(|v| !v.is_finite()) {
            out.push("x1: entries must be finite".into());
        }

        match (&self.operator, self.kind.needs_operator()) {
            (None, true) => out.push(format!("kind `{}` requires an `operator` section", self.kind.as_str())),
            (Some(op), _) => self.operator_violations(op, &mut out),
            (None, false) => {}
        }
        if self.kind == Kind::Minimize && self.operator.as_ref().is_some_and(|o| o.builtin != Builtin::Gradient) {
            out.push("kind `minimize` requires a functional: set operator.builtin to `gradient`".into());
        }

        if self.kind.needs_family() {
            match &self.family {
                None => out.push(format!("kind `{}` requires a `family` section", self.kind.as_str())),
                Some(f) if f.is_empty() => out.push("family: at least one set is required".into()),
                Some(_) => {}
            }
        }
        if let Some(family) = &self.family {
            for (i, set) in family.iter().enumerate() {
                if let Err(e) = set.validate() {
                    out.push(format!("family[{i}]: {e}"));
                } else {
                    check_len(&format!("family[{i}]"), set.dim(), n, &mut out);
                }
            }
        }
        if matches!(self.kind, Kind::Vi | Kind::Compare) && self.family.is_some() {
            match &self.witness {
                None => out.push("family: a `witness` point lying in every set is required".into()),
                Some(w) if w.len() != n => check_len("witness", w.len(), n, &mut out),
                Some(_) => {
                    if out.is_empty() {
                        if let Err(e) = self.cyclic_family() {
                            out.push(format!("witness: {e}"));
                        }
                    }
                }
            }
        }
        if self.kind.needs_hilbert() && space.is_some_and(|s| !s.is_hilbert()) {
            out.push(format!("kind `{}` requires s = p = 2", self.kind.as_str()));
        }

        if !(self.oracle.tol > 0.0) {
            out.push("oracle.tol: must be > 0".into());
        }
        if !(self.gp.step > 0.0 && self.gp.step.is_finite()) {
            out.push("gp.step: must be > 0".into());
        }
        if !(self.path.inner_tol > 0.0) {
            out.push("path.inner_tol: must be > 0".into());
        }
        if self.path.inner_max < 1 {
            out.push("path.inner_max: must be at least 1".into());
        }
        if self.path.m == Some(0) {
            out.push("path.m: must be at least 1".into());
        }
        if let Some(ix) = &self.path.indices {
            if ix.is_empty() || ix[0] < 1 || ix.windows(2).any(|w| w[1] <= w[0]) {
                out.push("path.indices: must be nonempty, >= 1 and strictly increasing".into());
            }
        }
        let st = self.output.stride;
        if st.every < 1 || st.then_every < 1 {
            out.push("output.stride: strides must be at least 1".into());
        }
        out
    }

    fn operator_violations(&self, op: &OperatorSpec, out: &mut Vec<String>) {
        let n = self.space.n;
        let allowed: &[&str] = match op.builtin {
            Builtin::Power => &[],
            Builtin::Linear => &["matrix", "offset"],
            Builtin::Gradient => &["functional", "center", "analytic"],
        };
        let present = [
            ("matrix", op.matrix.is_some()),
            ("offset", op.offset.is_some()),
            ("functional", op.functional.is_some()),
            ("center", op.center.is_some()),
            ("analytic", op.analytic.is_some()),
        ];
        for (key, there) in present {
            if there && !allowed.contains(&key) {
                out.push(format!("operator: `{key}` does not apply to builtin `{:?}`", op.builtin).to_lowercase());
            }
        }
        match op.builtin {
            Builtin::Power => {
                if self.space.p < 2.0 {
                    out.push(format!("operator: power map needs p >= 2, got {}", self.space.p));
                }
            }
            Builtin::Linear => match &op.matrix {
                None => out.push("operator: builtin `linear` requires `matrix`".into()),
                Some(m) => {
                    check_len("operator.matrix", m.len(), n * n, out);
                    if let Some(b) = &op.offset {
                        check_len("operator.offset", b.len(), n, out);
                    }
                }
            },
            Builtin::Gradient => {
                if op.functional.is_none() {
                    out.push("operator: builtin `gradient` requires `functional` (quadratic or quartic)".into());
                }
                match &op.center {
                    None => out.push("operator: builtin `gradient` requires `center`".into()),
                    Some(c) => check_len("operator.center", c.len(), n, out),
                }
            }
        }
        if out.is_empty() {
            if let Err(e) = self.build_operator() {
                out.push(format!("operator: {e}"));
            }
        }
    }

    pub fn space_spec(&self) -> Result<SpaceSpec> {
        SpaceSpec::new(self.space.n, self.space.s, self.space.p)
    }

    pub fn x1_vector(&self) -> PrimalVector {
        PrimalVector::new(self.x1.clone())
    }

    pub fn test_functional(&self) -> Option<TestFunctional> {
        let op = self.operator.as_ref()?;
        let c = op.center.clone()?;
        Some(match op.functional? {
            FunctionalKind::Quadratic => TestFunctional::half_squared_distance(c),
            FunctionalKind::Quartic => TestFunctional::quartic_quadratic(c),
        })
    }

    pub fn build_operator(&self) -> Result<MonotoneOperator> {
        let space = self.space_spec()?;
        let n = space.n();
        let op = self
            .operator
            .as_ref()
            .ok_or_else(|| Error::Config(vec!["no operator configured".into()]))?;
        match op.builtin {
            Builtin::Power => power_map(space),
            Builtin::Linear => {
                let m = op.matrix.as_ref().ok_or_else(|| Error::Config(vec!["linear operator without matrix".into()]))?;
                space.check_len(m.len() / n.max(1))?;
                let g = DMatrix::from_row_slice(n, n, m);
                let b = op.offset.clone().map_or_else(|| DualCovector::zeros(n), DualCovector::new);
                linear_map(space, g, b)
            }
            Builtin::Gradient => {
                let tf = self
                    .test_functional()
                    .ok_or_else(|| Error::Config(vec!["gradient operator needs functional and center".into()]))?;
                let grad = op.analytic.unwrap_or(true).then(|| tf.grad.clone());
                gradient_of(space, tf.f, grad, None)
            }
        }
    }

    pub fn cyclic_family(&self) -> Result<CyclicFamily> {
        let sets = self.family.clone().ok_or_else(|| Error::Config(vec!["no family configured".into()]))?;
        let w = self.witness.clone().ok_or_else(|| Error::Config(vec!["no witness configured".into()]))?;
        CyclicFamily::from_sets(sets, PrimalVector::new(w))
    }

    /// Normalized JSON with all defaults spelled out; parses back to an equal
    /// configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
