//! Slow reference solvers used to check the iteration kernels. None of this
//! code goes through the solver module.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::MonotoneOperator;
use crate::projections::ConvexSet;
use crate::sampling::{seeded_rng, uniform_cube};
use crate::space::{PrimalVector, SpaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Newton,
    ProjectedGradient,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSolution {
    pub point: PrimalVector,
    pub method: OracleMethod,
    pub residual: f64,
    pub certified_tol: f64,
}

/// Number of seeded Newton starts besides the origin.
const NEWTON_STARTS: usize = 8;
const NEWTON_MAX_ITER: usize = 400;

fn residual(op: &MonotoneOperator, x: &PrimalVector) -> f64 {
    let t = op.apply(x);
    op.space().dual_norm(&t).unwrap_or(f64::INFINITY)
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Central-difference Jacobian, column `j` = `(T(x + h e_j) − T(x − h e_j)) / 2h`.
fn jacobian(op: &MonotoneOperator, x: &PrimalVector) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = 1e-6 * (1.0 + x[j].abs());
        let mut plus = x.as_slice().to_vec();
        let mut minus = plus.clone();
        plus[j] += h;
        minus[j] -= h;
        let tp = op.apply(&PrimalVector::new(plus));
        let tm = op.apply(&PrimalVector::new(minus));
        for i in 0..n {
            jac[(i, j)] = (tp[i] - tm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Damped Newton on `T x = 0` with backtracking on `‖T x‖₂`.
fn newton(op: &MonotoneOperator, start: PrimalVector, tol: f64) -> (PrimalVector, f64) {
    let mut x = start;
    let mut tx = op.apply(&x);
    let mut merit = euclid(tx.as_slice());
    for _ in 0..NEWTON_MAX_ITER {
        if residual(op, &x) <= tol || !merit.is_finite() {
            break;
        }
        let jac = jacobian(op, &x);
        let rhs = DVector::from_iterator(x.len(), tx.iter().map(|v| -v));
        let Some(dir) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-12 {
            let trial = PrimalVector::new(x.iter().zip(dir.iter()).map(|(a, d)| a + step * d).collect());
            let tt = op.apply(&trial);
            let m = euclid(tt.as_slice());
            if m < merit {
                x = trial;
                tx = tt;
                merit = m;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let r = residual(op, &x);
    (x, r)
}

/// Coarse-to-fine grid search for `min ‖T x‖₂` on `[-radius, radius]^n`,
/// `n ≤ 2`.
fn grid_refine(op: &MonotoneOperator, radius: f64) -> PrimalVector {
    let n = op.space().n();
    let pts = 41usize;
    let mut center = vec![0.0; n];
    let mut half = radius;
    for _ in 0..40 {
        let mut best = (f64::INFINITY, center.clone());
        let coord = |k: usize, c: f64| c - half + 2.0 * half * k as f64 / (pts - 1) as f64;
        let total = pts.pow(n as u32);
        for idx in 0..total {
            let mut p = Vec::with_capacity(n);
            let mut rest = idx;
            for c in &center {
                p.push(coord(rest % pts, *c));
                rest /= pts;
            }
            let m = euclid(op.apply(&PrimalVector::new(p.clone())).as_slice());
            if m < best.0 {
                best = (m, p);
            }
        }
        center = best.1;
        half *= 0.25;
    }
    PrimalVector::new(center)
}

/// A zero of `op` inside the cube `[-radius, radius]^n`, by damped Newton
/// with a finite-difference Jacobian from the origin and several seeded
/// starts, then (for `n ≤ 2`) a grid search polished by Newton.
pub fn oracle_zero(op: &MonotoneOperator, radius: f64, tol: f64, seed: u64) -> Result<OracleSolution> {
    let n = op.space().n();
    if n > 10 {
        return Err(Error::OracleFailed(format!("dense oracle supports n <= 10, got {n}")));
    }
    if !(tol > 0.0 && radius > 0.0) {
        return Err(Error::OracleFailed("tolerance and radius must be positive".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut starts = vec![PrimalVector::zeros(n)];
    starts.extend((0..NEWTON_STARTS).map(|_| uniform_cube(&mut rng, n, radius)));
    let mut best: Option<(PrimalVector, f64)> = None;
    for s in starts {
        let (x, r) = newton(op, s, tol);
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((x, r));
        }
        if r <= tol {
            break;
        }
    }
    if best.as_ref().is_some_and(|(_, r)| *r > tol) && n <= 2 {
        let (x, r) = newton(op, grid_refine(op, radius), tol);
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((x, r));
        }
    }
    match best {
        Some((point, r)) if r <= tol && point.max_abs() <= radius => Ok(OracleSolution {
            point,
            method: OracleMethod::Newton,
            residual: r,
            certified_tol: tol,
        }),
        Some((_, r)) => Err(Error::OracleFailed(format!("no root found in the region (best residual {r:.3e})"))),
        None => Err(Error::OracleFailed("no root found in the region".into())),
    }
}

/// Zero of `x ↦ G x − b` by a dense LU solve.
pub fn oracle_linear(g: &DMatrix<f64>, b: &[f64], tol: f64) -> Result<OracleSolution> {
    let n = g.nrows();
    let sol = g
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .ok_or_else(|| Error::OracleFailed("singular matrix".into()))?;
    let r = (g * &sol) - DVector::from_column_slice(b);
    let point = PrimalVector::new(sol.iter().copied().collect());
    let residual = r.norm();
    if !(residual <= tol) || point.len() != n {
        return Err(Error::OracleFailed(format!("linear solve residual {residual:.3e} above {tol:.1e}")));
    }
    Ok(OracleSolution {
        point,
        method: OracleMethod::ClosedForm,
        residual,
        certified_tol: tol,
    })
}

/// Euclidean projection onto `∩ sets` by Dykstra's alternating projections.
pub fn project_intersection(sets: &[ConvexSet], x: &PrimalVector, tol: f64, max_sweeps: usize) -> Result<PrimalVector> {
    if sets.is_empty() {
        return Ok(x.clone());
    }
    if sets.len() == 1 {
        return sets[0].project(x);
    }
    let n = x.len();
    let mut y = x.clone();
    let mut corr = vec![PrimalVector::zeros(n); sets.len()];
    for _ in 0..max_sweeps {
        let before = y.clone();
        for (set, c) in sets.iter().zip(corr.iter_mut()) {
            let shifted = y.add(c);
            let proj = set.project(&shifted)?;
            *c = shifted.sub(&proj);
            y = proj;
        }
        let moved = euclid(y.sub(&before).as_slice());
        let inside = sets.iter().all(|s| s.contains(&y, tol));
        if moved <= tol * 1e-2 && inside {
            return Ok(y);
        }
    }
    Err(Error::OracleFailed(format!(
        "cyclic projections did not reach the intersection within {max_sweeps} sweeps"
    )))
}

const VI_STEP: f64 = 0.1;
const VI_MAX_ITER: usize = 2_000_000;

/// Solution of the variational inequality `⟨y − x*, T x*⟩ ≥ 0` for all `y`
/// in the intersection of `sets`, by projected gradient with step
/// `γ = 0.1` iterated until `‖x − P_C(x − γ T x)‖ ≤ tol`.
pub fn oracle_vi(op: &MonotoneOperator, sets: &[ConvexSet], witness: &PrimalVector, tol: f64) -> Result<OracleSolution> {
    let space: &SpaceSpec = op.space();
    if !space.is_hilbert() {
        return Err(Error::OracleFailed("variational-inequality oracle needs s = p = 2".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::OracleFailed("tolerance must be positive".into()));
    }
    if !sets.iter().all(|s| s.contains(witness, 1e-12)) {
        return Err(Error::OracleFailed("witness is not in every set".into()));
    }
    let proj_tol = tol * 1e-3;
    let mut x = project_intersection(sets, witness, proj_tol, 1_000_000)?;
    for _ in 0..VI_MAX_ITER {
        let tx = op.apply(&x);
        let trial = x.axpy(-VI_STEP, &PrimalVector::new(tx.into_vec()));
        let next = project_intersection(sets, &trial, proj_tol, 1_000_000)?;
        let gap = euclid(next.sub(&x).as_slice());
        x = next;
        if gap <= tol * VI_STEP {
            let tx = op.apply(&x);
            let fixed = project_intersection(sets, &x.axpy(-VI_STEP, &PrimalVector::new(tx.into_vec())), proj_tol, 1_000_000)?;
            let residual = euclid(fixed.sub(&x).as_slice());
            return Ok(OracleSolution {
                point: x,
                method: OracleMethod::ProjectedGradient,
                residual,
                certified_tol: tol,
            });
        }
    }
    Err(Error::OracleFailed("projected gradient did not reach a fixed point".into()))
}
