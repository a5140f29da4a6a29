use crate::error::{Error, Result};
use crate::operators::{gradient_of, Functional, GradientFn, MonotoneOperator};
use crate::projections::{check_quasi_phi_nonexpansive, ConvexSet, CyclicFamily};
use crate::schedules::Schedule;
use crate::space::{DualCovector, PrimalVector, SpaceSpec};

use super::{drive, IterationTrace, SolveReport, SolveStatus, Step, StopRule, TraceOptions};

fn check_operator(space: &SpaceSpec, op: &MonotoneOperator) -> Result<()> {
    space.check_len(op.space().n())
}

fn require_hilbert(space: &SpaceSpec) -> Result<()> {
    if !space.is_hilbert() {
        return Err(Error::NotHilbert {
            s: space.s(),
            p: space.p(),
        });
    }
    Ok(())
}

/// `J x_n − λ(Tx_n + θ(J x_n − anchor))`, coordinatewise.
fn anchored_dual_step(jx: &DualCovector, tx: &DualCovector, anchor: &DualCovector, lambda: f64, theta: f64) -> DualCovector {
    DualCovector::new(
        jx.iter()
            .zip(tx.iter())
            .zip(anchor.iter())
            .map(|((j, t), a)| j - lambda * (t + theta * (j - a)))
            .collect(),
    )
}

/// Anchored dual-space iteration
///
/// ```text
/// x_{n+1} = J_p^{-1}( J_p x_n − λ_n (T x_n + θ_n (J_p x_n − J_p x_1)) )
/// ```
///
/// run until the stop rule fires. The residual is `‖T x_n‖_*`.
pub fn solve_zero(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    stop: &StopRule,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    check_operator(space, op)?;
    space.check_len(x1.len())?;
    let jx1 = space.duality_map(x1);
    drive(space, x1, schedule, stop, opts, |_, lambda, theta, x| {
        let tx = op.apply(x);
        let jx = space.duality_map(x);
        let u = anchored_dual_step(&jx, &tx, &jx1, lambda, theta);
        Step {
            residual: space.dual_norm_unchecked(&tx),
            next: space.inverse_duality_map(&u),
            feasibility: None,
        }
    })
}

/// The same iteration written directly in a Hilbert space, where `J_2` is
/// the identity:
///
/// ```text
/// x_{n+1} = x_n − λ_n T x_n − λ_n θ_n (x_n − x_1)
/// ```
pub fn solve_zero_hilbert(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    stop: &StopRule,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    require_hilbert(space)?;
    check_operator(space, op)?;
    space.check_len(x1.len())?;
    drive(space, x1, schedule, stop, opts, |_, lambda, theta, x| {
        let tx = op.apply(x);
        let next = x
            .iter()
            .zip(tx.iter())
            .zip(x1.iter())
            .map(|((xi, ti), ai)| xi - lambda * ti - lambda * theta * (xi - ai))
            .collect();
        Step {
            residual: space.dual_norm_unchecked(&tx),
            next: PrimalVector::new(next),
            feasibility: None,
        }
    })
}

/// Minimizes a convex functional by driving its gradient to zero with
/// [`solve_zero`]. Uses `grad` when supplied, central differences otherwise.
/// The report carries `f(x_final)`; a non-finite value marks the run diverged.
pub fn minimize(
    space: &SpaceSpec,
    f: Functional,
    grad: Option<GradientFn>,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    stop: &StopRule,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    let op = gradient_of(*space, f.clone(), grad, None)?;
    let (mut report, trace) = solve_zero(space, &op, x1, schedule, stop, opts)?;
    let value = f(&report.final_point);
    if !value.is_finite() && report.status != SolveStatus::DivergedNonfinite {
        report.status = SolveStatus::DivergedNonfinite;
        report.diverged_at = Some(report.iterations + 1);
    }
    report.final_objective = Some(value);
    Ok((report, trace))
}

/// Samples used when gating a family for use outside Hilbert space.
const FAMILY_CHECK_SAMPLES: usize = 256;

/// Variational inequality over the common fixed points of a cyclic family:
/// with `w_n = φ_{[n]} x_n`,
///
/// ```text
/// x_{n+1} = J_p^{-1}( J_p w_n − λ_n (T w_n + θ_n (J_p w_n − J_p φ_{[n]} x_1)) )
/// ```
///
/// and the direct form `w_n − λ_n(T w_n + θ_n(w_n − φ_{[n]} x_1))` in Hilbert
/// space. Outside Hilbert space every map must first pass the
/// quasi-`φ_p`-nonexpansive check at every declared witness.
pub fn solve_vi(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    family: &CyclicFamily,
    x1: &PrimalVector,
    schedule: &dyn Schedule,
    stop: &StopRule,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    check_operator(space, op)?;
    space.check_len(x1.len())?;
    if family.is_empty() {
        return Err(Error::invalid("family", "at least one map is required"));
    }
    for u in family.witnesses() {
        space.check_len(u.len())?;
    }
    let hilbert = space.is_hilbert();
    if !hilbert {
        for (i, m) in family.maps().iter().enumerate() {
            for u in family.witnesses() {
                let check = check_quasi_phi_nonexpansive(space, m.as_ref(), u, FAMILY_CHECK_SAMPLES, i as u64)?;
                if !check.holds {
                    return Err(Error::NotQuasiNonexpansive {
                        index: i + 1,
                        residual: check.worst_residual,
                    });
                }
            }
        }
    }
    drive(space, x1, schedule, stop, opts, |n, lambda, theta, x| {
        let w = family.apply_cyclic(n, x);
        let anchor = family.apply_cyclic(n, x1);
        let tw = op.apply(&w);
        let next = if hilbert {
            PrimalVector::new(
                w.iter()
                    .zip(tw.iter())
                    .zip(anchor.iter())
                    .map(|((wi, ti), ai)| wi - lambda * (ti + theta * (wi - ai)))
                    .collect(),
            )
        } else {
            let jw = space.duality_map(&w);
            let ja = space.duality_map(&anchor);
            space.inverse_duality_map(&anchored_dual_step(&jw, &tw, &ja, lambda, theta))
        };
        Step {
            residual: space.dual_norm_unchecked(&tw),
            next,
            feasibility: Some(family.feasibility_gap(x)),
        }
    })
}

/// Projected-gradient baseline `x_{n+1} = P_K(x_n − η_n T x_n)` in Hilbert
/// space. The trace's `lambda` column holds `η_n` and `theta` is 0.
pub fn gradient_projection(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    set: &ConvexSet,
    x1: &PrimalVector,
    stepsizes: &(dyn Fn(u64) -> f64 + Send + Sync),
    stop: &StopRule,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    set.validate()?;
    space.check_len(set.dim())?;
    let project = |x: &PrimalVector| set.project(x).expect("dimension checked");
    gradient_projection_with(space, op, &project, x1, stepsizes, stop, opts)
}

/// [`gradient_projection`] with a caller-supplied projection, for feasible
/// regions that are not one of the simple sets.
pub fn gradient_projection_with(
    space: &SpaceSpec,
    op: &MonotoneOperator,
    project: &(dyn Fn(&PrimalVector) -> PrimalVector + Send + Sync),
    x1: &PrimalVector,
    stepsizes: &(dyn Fn(u64) -> f64 + Send + Sync),
    stop: &StopRule,
    opts: &TraceOptions,
) -> Result<(SolveReport, IterationTrace)> {
    require_hilbert(space)?;
    check_operator(space, op)?;
    let schedule = crate::schedules::FnSchedule {
        lambda: stepsizes,
        theta: |_| 0.0,
    };
    drive(space, x1, &schedule, stop, opts, |_, eta, _, x| {
        let tx = op.apply(x);
        let trial = PrimalVector::new(x.iter().zip(tx.iter()).map(|(xi, ti)| xi - eta * ti).collect());
        Step {
            residual: space.dual_norm_unchecked(&tx),
            next: project(&trial),
            feasibility: None,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{coupled_matrix, linear_map, power_map, shifted_identity, TestFunctional};
    use crate::schedules::{FnSchedule, PowerSchedule, Unregularized};
    use nalgebra::DMatrix;

    fn h(n: usize) -> SpaceSpec {
        SpaceSpec::hilbert(n).unwrap()
    }

    fn identity(n: usize) -> MonotoneOperator {
        linear_map(h(n), DMatrix::identity(n, n), DualCovector::zeros(n)).unwrap()
    }

    #[test]
    fn fixed_point_when_anchor_is_a_zero() {
        let space = SpaceSpec::lp(3, 3.0).unwrap();
        let op = power_map(space).unwrap();
        let x1 = PrimalVector::zeros(3);
        let stop = StopRule { tol_residual: 1e-300, tol_step: 0.0, max_iter: 50 };
        let (rep, _) = solve_zero(&space, &op, &x1, &PowerSchedule::default(), &stop, &TraceOptions::default()).unwrap();
        assert_eq!(rep.final_point, x1);

        let c: PrimalVector = [1.0, -2.0].into();
        let shift = shifted_identity(h(2), DualCovector::new(c.as_slice().to_vec())).unwrap();
        let stop = StopRule { tol_residual: 1e-300, tol_step: 0.0, max_iter: 100 };
        let (rep, trace) =
            solve_zero(&h(2), &shift, &c, &PowerSchedule::default(), &stop, &TraceOptions::default().with_coords()).unwrap();
        assert!(trace.rows.iter().all(|r| r.coords.as_deref() == Some(c.as_slice())));
        assert_eq!(rep.final_point, c);
    }

    #[test]
    fn hilbert_first_step() {
        let sched = FnSchedule {
            lambda: |_| 0.5,
            theta: |_| 0.25,
        };
        let stop = StopRule { tol_residual: 1e-12, tol_step: 0.0, max_iter: 1 };
        let (rep, _) =
            solve_zero_hilbert(&h(2), &identity(2), &[1.0, 0.0].into(), &sched, &stop, &TraceOptions::default()).unwrap();
        assert_eq!(rep.final_point.as_slice(), &[0.5, 0.0]);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.status, SolveStatus::MaxIterReached);
    }

    #[test]
    fn zero_operator_keeps_start() {
        let zero = MonotoneOperator::new(h(2), 2.0, 1.0, "zero", |x| DualCovector::zeros(x.len())).unwrap();
        let x1: PrimalVector = [3.0, 4.0].into();
        let stop = StopRule { tol_residual: 0.0, tol_step: 1e-12, max_iter: 10 };
        let (rep, _) =
            solve_zero_hilbert(&h(2), &zero, &x1, &PowerSchedule::default(), &stop, &TraceOptions::default()).unwrap();
        assert_eq!(rep.final_point, x1);
    }

    #[test]
    fn hilbert_kernel_requires_hilbert() {
        let s = SpaceSpec::lp(2, 3.0).unwrap();
        let op = power_map(s).unwrap();
        let r = solve_zero_hilbert(&s, &op, &[1.0, 1.0].into(), &PowerSchedule::default(), &StopRule::default(), &TraceOptions::default());
        assert!(matches!(r, Err(Error::NotHilbert { .. })));
    }

    #[test]
    fn kernels_agree_in_hilbert_space() {
        let op = linear_map(h(2), coupled_matrix(), DualCovector::zeros(2)).unwrap();
        let x1: PrimalVector = [10.0, -10.0].into();
        let sched = PowerSchedule::new(0.1, 0.5, 0.01, 0.25).unwrap();
        let stop = StopRule { tol_residual: 1e-300, tol_step: 0.0, max_iter: 1000 };
        let opts = TraceOptions::default().with_coords();
        let (_, a) = solve_zero(&h(2), &op, &x1, &sched, &stop, &opts).unwrap();
        let (_, b) = solve_zero_hilbert(&h(2), &op, &x1, &sched, &stop, &opts).unwrap();
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            let (ca, cb) = (ra.coords.as_ref().unwrap(), rb.coords.as_ref().unwrap());
            let scale = 1.0 + ca.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (u, v) in ca.iter().zip(cb) {
                assert!((u - v).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn unregularized_mode_matches_product_formula() {
        let sched = Unregularized(PowerSchedule::new(0.5, 0.5, 0.1, 0.5).unwrap());
        let x1: PrimalVector = [2.0, -1.0].into();
        let stop = StopRule { tol_residual: 1e-300, tol_step: 0.0, max_iter: 200 };
        let (_, trace) = solve_zero(&h(2), &identity(2), &x1, &sched, &stop, &TraceOptions::default().with_coords()).unwrap();
        let mut factor = 1.0;
        for row in &trace.rows {
            let c = row.coords.as_ref().unwrap();
            assert!((c[0] - 2.0 * factor).abs() <= 1e-10 * (1.0 + 2.0 * factor));
            assert!((c[1] + factor).abs() <= 1e-10);
            factor *= 1.0 - sched.lambda_at(row.n);
        }
    }

    #[test]
    fn non_finite_iterates_are_reported() {
        let blowup = MonotoneOperator::new(h(1), 2.0, 1.0, "cube", |x| DualCovector::new(vec![x[0].powi(3) * 1e10])).unwrap();
        let sched = FnSchedule { lambda: |_| 0.9, theta: |_| 0.1 };
        let (rep, trace) =
            solve_zero(&h(1), &blowup, &[10.0].into(), &sched, &StopRule::default(), &TraceOptions::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::DivergedNonfinite);
        assert!(rep.diverged_at.is_some());
        assert!(trace.rows.iter().all(|r| r.residual_dual.is_finite() && r.lambda.is_finite()));
    }

    #[test]
    fn minimize_quadratic() {
        let c = vec![1.0, -2.0];
        let tf = TestFunctional::half_squared_distance(c.clone());
        let sched = PowerSchedule::new(0.5, 0.5, 1e-4, 0.25).unwrap();
        let stop = StopRule { tol_residual: 1e-9, tol_step: 0.0, max_iter: 100_000 };
        let (rep, trace) = minimize(&h(2), tf.f.clone(), Some(tf.grad.clone()), &[0.0, 0.0].into(), &sched, &stop, &TraceOptions::default().with_coords()).unwrap();
        let err = ((rep.final_point[0] - 1.0).powi(2) + (rep.final_point[1] + 2.0).powi(2)).sqrt();
        assert!(err <= 1e-4, "err {err} status {:?}", rep.status);
        // objective decreasing after burn-in
        let vals: Vec<f64> = trace.rows.iter().map(|r| (tf.f)(&PrimalVector::new(r.coords.clone().unwrap()))).collect();
        assert!(vals.windows(2).skip(5).all(|w| w[1] <= w[0] + 1e-15));
        assert!(rep.final_objective.unwrap() < 1e-8);
    }

    #[test]
    fn minimize_constant_stops_on_step() {
        let tf = TestFunctional::constant(2.0, 2);
        let stop = StopRule { tol_residual: 0.0, tol_step: 1e-12, max_iter: 1000 };
        let (rep, _) = minimize(&h(2), tf.f, None, &[0.5, 0.5].into(), &PowerSchedule::default(), &stop, &TraceOptions::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::ConvergedStep);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.final_objective, Some(2.0));
    }

    #[test]
    fn vi_with_identity_family_matches_hilbert_kernel() {
        let op = linear_map(h(2), coupled_matrix(), DualCovector::zeros(2)).unwrap();
        let x1: PrimalVector = [1.0, 2.0].into();
        let sched = PowerSchedule::new(0.1, 0.5, 0.01, 0.25).unwrap();
        let stop = StopRule { tol_residual: 1e-300, tol_step: 0.0, max_iter: 500 };
        let opts = TraceOptions::default().with_coords();
        let (_, a) = solve_vi(&h(2), &op, &CyclicFamily::identity(2), &x1, &sched, &stop, &opts).unwrap();
        let (_, b) = solve_zero_hilbert(&h(2), &op, &x1, &sched, &stop, &opts).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            for (u, v) in ra.coords.as_ref().unwrap().iter().zip(rb.coords.as_ref().unwrap()) {
                assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn vi_box_converges_to_corner() {
        let op = shifted_identity(h(2), [2.0, 2.0].into()).unwrap();
        let set = ConvexSet::new_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let fam = CyclicFamily::from_sets(vec![set], [0.5, 0.5].into()).unwrap();
        let sched = PowerSchedule::new(0.9, 0.7, 1e-3, 0.2).unwrap();
        let stop = StopRule { tol_residual: 1e-9, tol_step: 0.0, max_iter: 100_000 };
        let (rep, _) = solve_vi(&h(2), &op, &fam, &[0.0, 0.0].into(), &sched, &stop, &TraceOptions::default()).unwrap();
        let p = &rep.final_point;
        assert!(((p[0] - 1.0).powi(2) + (p[1] - 1.0).powi(2)).sqrt() <= 1e-3, "{p:?}");
    }

    #[test]
    fn vi_banach_mode_rejects_uncertified_maps() {
        let s = SpaceSpec::lp(2, 3.0).unwrap();
        let op = power_map(s).unwrap();
        let expand: crate::projections::SelfMap = std::sync::Arc::new(|x: &PrimalVector| x.scale(2.0));
        let fam = CyclicFamily::new(vec![expand], vec!["double".into()], vec![PrimalVector::zeros(2)]).unwrap();
        let r = solve_vi(&s, &op, &fam, &[1.0, 1.0].into(), &PowerSchedule::default(), &StopRule::default(), &TraceOptions::default());
        assert!(matches!(r, Err(Error::NotQuasiNonexpansive { index: 1, .. })));
    }

    #[test]
    fn gradient_projection_examples() {
        let op = shifted_identity(h(2), [2.0, 2.0].into()).unwrap();
        let set = ConvexSet::new_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let stop = StopRule { tol_residual: 1e-12, tol_step: 1e-14, max_iter: 1000 };
        let (rep, _) = gradient_projection(&h(2), &op, &set, &[0.0, 0.0].into(), &|_| 0.5, &stop, &TraceOptions::default()).unwrap();
        assert!((rep.final_point[0] - 1.0).abs() < 1e-12 && (rep.final_point[1] - 1.0).abs() < 1e-12);

        let ball = ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let stop1 = StopRule { tol_residual: 1e-12, tol_step: 0.0, max_iter: 1 };
        let (rep, _) = gradient_projection(&h(2), &identity(2), &ball, &[2.0, 0.0].into(), &|_| 0.5, &stop1, &TraceOptions::default()).unwrap();
        assert_eq!(rep.final_point.as_slice(), &[1.0, 0.0]);

        // fixed point stays put
        let (rep, trace) = gradient_projection(&h(2), &op, &set, &[1.0, 1.0].into(), &|_| 0.5, &stop, &TraceOptions::default()).unwrap();
        assert_eq!(rep.final_point.as_slice(), &[1.0, 1.0]);
        assert_eq!(rep.status, SolveStatus::ConvergedStep);
        assert!(trace.rows.iter().all(|r| r.theta == 0.0));
    }

    #[test]
    fn power_map_banach_converges() {
        let s = SpaceSpec::lp(5, 3.0).unwrap();
        let op = power_map(s).unwrap();
        let sched = PowerSchedule::new(0.5, 0.1, 1e-3, 0.8).unwrap();
        let (rep, _) = solve_zero(&s, &op, &PrimalVector::new(vec![1.0; 5]), &sched, &StopRule::default(), &TraceOptions::default()).unwrap();
        assert!(s.norm(&rep.final_point).unwrap() <= 1e-3, "{rep:?}");
    }
}
