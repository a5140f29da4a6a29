//! The resolvent `(J_p + tT)^{-1} J_p` and the regularization path it traces
//! as `t = 1/θ_n` grows.

use crate::error::{Error, Result};
use crate::operators::MonotoneOperator;
use crate::schedules::Schedule;
use crate::space::{DualCovector, PrimalVector, SpaceSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventResult {
    pub y: PrimalVector,
    pub t: f64,
    pub inner_iterations: usize,
    /// `‖J_p y + tTy − J_p x‖_*`, recomputed at the returned point.
    pub residual: f64,
}

fn residual_vec(space: &SpaceSpec, op: &MonotoneOperator, t: f64, jx: &DualCovector, y: &PrimalVector) -> (DualCovector, DualCovector) {
    let jy = space.duality_map(y);
    let ty = op.apply(y);
    let r = DualCovector::new(
        jy.iter()
            .zip(ty.iter())
            .zip(jx.iter())
            .map(|((a, b), c)| a + t * b - c)
            .collect(),
    );
    (jy, r)
}

/// Solves `J_p y + tTy = J_p x` for `y`.
///
/// Damped dual-space fixed point `y ← J_p^{-1}(J_p y − β(J_p y + tTy − J_p x))`
/// started at `y = x`, with `β₀ = 1/(1 + tL)` where `L` is a local Lipschitz
/// estimate of `T` from two probes, and `β` halved whenever a trial step fails
/// to decrease the residual.
pub fn resolvent(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    t: f64,
    x: &PrimalVector,
    inner_tol: f64,
    inner_max: usize,
) -> Result<ResolventResult> {
    resolvent_from(space, op, t, x, x, inner_tol, inner_max)
}

/// [`resolvent`] with an explicit starting guess `y0`.
pub fn resolvent_from(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    t: f64,
    x: &PrimalVector,
    y0: &PrimalVector,
    inner_tol: f64,
    inner_max: usize,
) -> Result<ResolventResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be > 0, got {t}")));
    }
    if !(inner_tol > 0.0) {
        return Err(Error::invalid("inner_tol", "must be > 0"));
    }
    space.check_len(x.len())?;
    space.check_len(y0.len())?;
    space.check_len(op.space().n())?;

    let jx = space.duality_map(x);
    let lipschitz = {
        let delta = 1e-3 * (1.0 + space.norm_unchecked(x));
        let dir = PrimalVector::new(vec![1.0; space.n()]);
        let dir = dir.scale(1.0 / space.norm_unchecked(&dir));
        let t0 = op.try_apply(x)?;
        let t1 = op.try_apply(&x.axpy(delta, &dir))?;
        space.dual_norm_unchecked(&t1.sub(&t0)) / delta
    };
    let mut beta = 1.0 / (1.0 + t * lipschitz);

    let mut y = y0.clone();
    let (mut jy, mut r) = residual_vec(space, op, t, &jx, &y);
    let mut rnorm = space.dual_norm_unchecked(&r);
    if !rnorm.is_finite() {
        return Err(Error::non_finite("resolvent residual"));
    }
    let mut iterations = 0;
    while rnorm > inner_tol && iterations < inner_max {
        iterations += 1;
        let trial = space.inverse_duality_map(&jy.axpy(-beta, &r));
        let (jt, rt) = residual_vec(space, op, t, &jx, &trial);
        let tnorm = space.dual_norm_unchecked(&rt);
        if tnorm < rnorm {
            y = trial;
            jy = jt;
            r = rt;
            rnorm = tnorm;
        } else {
            beta *= 0.5;
            if beta < f64::MIN_POSITIVE {
                break;
            }
        }
    }
    let (_, r) = residual_vec(space, op, t, &jx, &y);
    let residual = space.dual_norm_unchecked(&r);
    if !(residual <= inner_tol) {
        return Err(Error::ResolventFailed {
            iterations,
            best_residual: residual,
        });
    }
    Ok(ResolventResult {
        y,
        t,
        inner_iterations: iterations,
        residual,
    })
}

/// Comparison of `‖J y_{prev} − J y_n‖_*` against
/// `(θ_prev/θ_n − 1)·‖J y_prev − J x_1‖_*` between consecutive path points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepBoundCheck {
    pub prev_n: u64,
    pub lhs: f64,
    pub rhs: f64,
}

impl StepBoundCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathPoint {
    pub n: u64,
    pub theta: f64,
    pub y: PrimalVector,
    pub resolvent_residual: f64,
    pub inner_iterations: usize,
    /// `‖T y_n − θ_n(J x_1 − J y_n)‖_*`.
    pub stationarity_residual: f64,
    pub step_bound: Option<StepBoundCheck>,
}

/// Regularization path `y_n = (J_p + T/θ_n)^{-1} J_p x_1` for `n = 1..=m`.
pub fn regularization_path(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    m: u64,
    inner_tol: f64,
    inner_max: usize,
) -> Result<Vec<PathPoint>> {
    if m < 1 {
        return Err(Error::invalid("m", "need at least one path point"));
    }
    let indices: Vec<u64> = (1..=m).collect();
    regularization_path_at(space, op, x1, schedule, &indices, inner_tol, inner_max)
}

/// Regularization path at the given strictly increasing indices. Each
/// resolvent solve is warm-started at the previous path point; the diagnostic
/// comparison is between consecutive entries of `indices`.
pub fn regularization_path_at(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    indices: &[u64],
    inner_tol: f64,
    inner_max: usize,
) -> Result<Vec<PathPoint>> {
    if indices.is_empty() || indices[0] < 1 || indices.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("indices", "must be nonempty, >= 1 and strictly increasing"));
    }
    space.check_len(x1.len())?;
    let jx1 = space.duality_map(x1);
    let mut out: Vec<PathPoint> = Vec::with_capacity(indices.len());
    let mut start = x1.clone();
    for &n in indices {
        let theta = schedule.theta_at(n);
        let res = resolvent_from(space, op, 1.0 / theta, x1, &start, inner_tol, inner_max).map_err(|e| Error::PathFailed {
            index: n,
            source: Box::new(e),
        })?;
        let jy = space.duality_map(&res.y);
        let ty = op.apply(&res.y);
        let stationarity = DualCovector::new(
            ty.iter()
                .zip(jx1.iter().zip(jy.iter()))
                .map(|(t, (a, b))| t - theta * (a - b))
                .collect(),
        );
        let step_bound = out.last().map(|prev| {
            let jprev = space.duality_map(&prev.y);
            StepBoundCheck {
                prev_n: prev.n,
                lhs: space.dual_norm_unchecked(&jprev.sub(&jy)),
                rhs: (prev.theta / theta - 1.0) * space.dual_norm_unchecked(&jprev.sub(&jx1)),
            }
        });
        start = res.y.clone();
        out.push(PathPoint {
            n,
            theta,
            y: res.y,
            resolvent_residual: res.residual,
            inner_iterations: res.inner_iterations,
            stationarity_residual: space.dual_norm_unchecked(&stationarity),
            step_bound,
        });
    }
    Ok(out)
}
