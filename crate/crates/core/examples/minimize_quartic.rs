//! Minimizes f(x) = ¼Σ(x_i − c_i)⁴ + ½‖x − c‖² by driving its gradient to
//! zero, once with the analytic gradient and once with central differences.
//!
//!     cargo run --release --example minimize_quartic

use monozero::operators::TestFunctional;
use monozero::solver::{minimize, StopRule, TraceOptions};
use monozero::{PowerSchedule, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let c = vec![1.0, -2.0];
    let tf = TestFunctional::quartic_quadratic(c.clone());
    let space = SpaceSpec::hilbert(2)?;
    // the cubic term punishes long early steps, so start with a small λ₁
    let schedule = PowerSchedule::new(0.1, 0.5, 1e-3, 0.25)?;
    let stop = StopRule::new(1e-4, 0.0, 1_000_000)?;
    let x1 = PrimalVector::zeros(2);

    for (label, grad) in [("analytic", Some(tf.grad.clone())), ("finite differences", None)] {
        let (report, _) = minimize(&space, tf.f.clone(), grad, &x1, &schedule, &stop, &TraceOptions::default())?;
        let err = space.norm(&report.final_point.sub(&PrimalVector::new(c.clone())))?;
        println!(
            "{label:<18} {} in {} steps, |x - c| = {err:.3e}, f = {:.3e}",
            report.status.as_str(),
            report.iterations,
            report.final_objective.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
