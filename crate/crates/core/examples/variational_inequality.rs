//! Variational inequalities over a box and over the intersection of a ball
//! and a half-space, against the projected-gradient baseline and the oracle.
//!
//!     cargo run --release --example variational_inequality

use monozero::harness::{oracle_vi, project_intersection};
use monozero::operators::shifted_identity;
use monozero::solver::{gradient_projection_with, solve_vi, StopRule, TraceOptions};
use monozero::{ConvexSet, CyclicFamily, DualCovector, PowerSchedule, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let space = SpaceSpec::hilbert(2)?;
    let schedule = PowerSchedule::new(0.9, 0.7, 1e-3, 0.2)?;
    let stop = StopRule::max_iter(100_000);
    let x1 = PrimalVector::zeros(2);

    let cases = [
        ("box [0,1]^2, T x = x - (2,2)", vec![ConvexSet::new_box(vec![0.0, 0.0], vec![1.0, 1.0])?], [2.0, 2.0]),
        (
            "ball(0,1) and x_1 <= 0.5, T x = x - (2,0)",
            vec![ConvexSet::ball(vec![0.0, 0.0], 1.0)?, ConvexSet::halfspace(vec![1.0, 0.0], 0.5)?],
            [2.0, 0.0],
        ),
    ];
    for (label, sets, c) in cases {
        let op = shifted_identity(space, DualCovector::from(c))?;
        let oracle = oracle_vi(&op, &sets, &x1, 1e-10)?;
        let family = CyclicFamily::from_sets(sets.clone(), x1.clone())?;
        let (vi, _) = solve_vi(&space, &op, &family, &x1, &schedule, &stop, &TraceOptions::default())?;
        let project = |x: &PrimalVector| project_intersection(&sets, x, 1e-13, 100_000).unwrap_or_else(|_| x.clone());
        let (gp, _) = gradient_projection_with(&space, &op, &project, &x1, &|_| 0.5, &stop, &TraceOptions::default())?;
        println!("{label}");
        println!("  oracle   {:?}", oracle.point.as_slice());
        for (name, r) in [("cyclic", vi), ("gp", gp)] {
            println!(
                "  {name:<8} {:?}  gap {:.3e}  ({} after {})",
                r.final_point.as_slice(),
                space.norm(&r.final_point.sub(&oracle.point))?,
                r.status.as_str(),
                r.iterations
            );
        }
    }
    Ok(())
}
