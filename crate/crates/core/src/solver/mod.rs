//! Iteration kernels and their shared bookkeeping: stop rules, traces and
//! reports.

mod kernels;
mod resolvent;

pub use kernels::{gradient_projection, gradient_projection_with, minimize, solve_vi, solve_zero, solve_zero_hilbert};
pub use resolvent::{
    regularization_path, regularization_path_at, resolvent, resolvent_from, StepBoundCheck, PathPoint,
    ResolventResult,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::phi_p;
use crate::schedules::Schedule;
use crate::space::{PrimalVector, SpaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    /// Threshold on the dual norm of the residual at the current iterate; 0
    /// disables the rule.
    pub tol_residual: f64,
    /// Threshold on `‖x_{n+1} − x_n‖`; 0 disables the rule.
    pub tol_step: f64,
    pub max_iter: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            tol_residual: 1e-6,
            tol_step: 0.0,
            max_iter: 1_000_000,
        }
    }
}

impl StopRule {
    pub fn new(tol_residual: f64, tol_step: f64, max_iter: u64) -> Result<Self> {
        let rule = Self {
            tol_residual,
            tol_step,
            max_iter,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn max_iter(max_iter: u64) -> Self {
        Self {
            max_iter,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if !(self.tol_residual >= 0.0 && self.tol_step >= 0.0) {
            return Err(Error::invalid("tol", "tolerances must be nonnegative"));
        }
        if self.tol_residual == 0.0 && self.tol_step == 0.0 {
            return Err(Error::invalid("tol", "at least one tolerance must be positive"));
        }
        Ok(())
    }
}

/// Which iterations are written to the trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStride {
    pub every: u64,
    pub until: u64,
    pub then_every: u64,
}

impl Default for TraceStride {
    fn default() -> Self {
        Self {
            every: 1,
            until: 10_000,
            then_every: 10,
        }
    }
}

impl TraceStride {
    pub fn keeps(&self, n: u64) -> bool {
        if n <= self.until {
            (n - 1).is_multiple_of(self.every.max(1))
        } else {
            n.is_multiple_of(self.then_every.max(1))
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct TraceOptions {
    pub stride: TraceStride,
    pub record_coords: bool,
    /// Reference point for the `φ_p(reference, x_n)` column.
    pub reference: Option<PrimalVector>,
}

impl TraceOptions {
    pub fn with_reference(mut self, reference: PrimalVector) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_coords(mut self) -> Self {
        self.record_coords = true;
        self
    }

    pub fn every_step(mut self) -> Self {
        self.stride = TraceStride {
            every: 1,
            until: u64::MAX,
            then_every: 1,
        };
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    pub lambda: f64,
    pub theta: f64,
    pub residual_dual: f64,
    /// `‖x_n − x_{n−1}‖`, 0 on the first row.
    pub step_norm: f64,
    pub phi_to_ref: Option<f64>,
    /// `max_i ‖x_n − φ_i x_n‖` for the variational-inequality driver.
    pub feasibility: Option<f64>,
    pub coords: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// First recorded `n` whose `φ_p` distance to the reference is at most `tol`.
    pub fn first_within_phi(&self, tol: f64) -> Option<u64> {
        self.rows
            .iter()
            .find(|r| r.phi_to_ref.is_some_and(|v| v <= tol))
            .map(|r| r.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    ConvergedResidual,
    ConvergedStep,
    MaxIterReached,
    DivergedNonfinite,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::ConvergedResidual => "converged_residual",
            SolveStatus::ConvergedStep => "converged_step",
            SolveStatus::MaxIterReached => "max_iter_reached",
            SolveStatus::DivergedNonfinite => "diverged_nonfinite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub final_point: PrimalVector,
    pub final_residual: f64,
    /// Number of updates performed.
    pub iterations: u64,
    /// Index of the step that produced a non-finite value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_feasibility: Option<f64>,
}

/// What a kernel computes at `x_n`: the residual there and the next iterate.
pub(crate) struct Step {
    pub residual: f64,
    pub next: PrimalVector,
    pub feasibility: Option<f64>,
}

/// Shared outer loop: stop rules, non-finite detection, trace recording.
pub(crate) fn drive<F>(
    space: &SpaceSpec,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    stop: &StopRule,
    opts: &TraceOptions,
    mut step: F,
) -> Result<(SolveReport, IterationTrace)>
where
    F: FnMut(u64, f64, f64, &PrimalVector) -> Step,
{
    stop.validate()?;
    space.check_len(x1.len())?;
    if let Some(r) = &opts.reference {
        space.check_len(r.len())?;
    }
    if !x1.is_finite() {
        return Err(Error::non_finite("starting point"));
    }

    let mut trace = IterationTrace::default();
    let make_row = |n: u64, lambda: f64, theta: f64, x: &PrimalVector, s: &Step, step_norm: f64| TraceRow {
        n,
        lambda,
        theta,
        residual_dual: s.residual,
        step_norm,
        phi_to_ref: opts
            .reference
            .as_ref()
            .map(|r| phi_p(space, r, x).unwrap_or(f64::NAN)),
        feasibility: s.feasibility,
        coords: opts.record_coords.then(|| x.as_slice().to_vec()),
    };

    let mut x = x1.clone();
    let mut prev_step = 0.0;
    let mut n = 1u64;
    let status;
    let mut diverged_at = None;
    let final_step: Step;
    loop {
        let (lambda, theta) = (schedule.lambda_at(n), schedule.theta_at(n));
        let s = step(n, lambda, theta, &x);
        if !s.residual.is_finite() {
            status = SolveStatus::DivergedNonfinite;
            diverged_at = Some(n);
            final_step = s;
            break;
        }
        if stop.tol_residual > 0.0 && s.residual <= stop.tol_residual {
            trace.rows.push(make_row(n, lambda, theta, &x, &s, prev_step));
            return Ok((
                SolveReport {
                    status: SolveStatus::ConvergedResidual,
                    final_residual: s.residual,
                    final_point: x,
                    iterations: n - 1,
                    diverged_at: None,
                    final_objective: None,
                    final_feasibility: s.feasibility,
                },
                trace,
            ));
        }
        if opts.stride.keeps(n) {
            trace.rows.push(make_row(n, lambda, theta, &x, &s, prev_step));
        }
        if !s.next.is_finite() {
            status = SolveStatus::DivergedNonfinite;
            diverged_at = Some(n);
            final_step = s;
            break;
        }
        let step_norm = space.norm_unchecked(&s.next.sub(&x));
        x = s.next;
        prev_step = step_norm;
        n += 1;
        if stop.tol_step > 0.0 && step_norm <= stop.tol_step {
            status = SolveStatus::ConvergedStep;
            final_step = step(n, schedule.lambda_at(n), schedule.theta_at(n), &x);
            break;
        }
        if n > stop.max_iter {
            status = SolveStatus::MaxIterReached;
            final_step = step(n, schedule.lambda_at(n), schedule.theta_at(n), &x);
            break;
        }
    }

    let recorded = trace.rows.last().is_some_and(|r| r.n == n);
    if !recorded && final_step.residual.is_finite() {
        let row = make_row(n, schedule.lambda_at(n), schedule.theta_at(n), &x, &final_step, prev_step);
        trace.rows.push(row);
    }
    Ok((
        SolveReport {
            status,
            final_residual: final_step.residual,
            final_point: x,
            iterations: n - 1,
            diverged_at,
            final_objective: None,
            final_feasibility: final_step.feasibility,
        },
        trace,
    ))
}
