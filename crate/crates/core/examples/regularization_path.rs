//! Resolvents along the regularization path y_n = (J + T/θ_n)^{-1} J x₁ for
//! a linear operator and for the power map in ℓ₃².
//!
//!     cargo run --example regularization_path

use monozero::operators::{coupled_matrix, linear_map, power_map};
use monozero::solver::{regularization_path_at, resolvent};
use monozero::{DualCovector, PowerSchedule, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let h = SpaceSpec::hilbert(2)?;
    let op = linear_map(h, coupled_matrix(), DualCovector::zeros(2))?;
    let x1 = PrimalVector::from([10.0, -10.0]);
    let indices = [1, 10, 100, 1_000, 10_000, 100_000];
    let path = regularization_path_at(&h, &op, &x1, &PowerSchedule::default(), &indices, 1e-10, 100_000)?;
    println!("{:>8} {:>12} {:>12} {:>11} {:>11}", "n", "theta", "|y_n|", "stationarity", "ratio ok");
    for p in &path {
        println!(
            "{:>8} {:>12.4e} {:>12.4e} {:>11.2e} {:>11}",
            p.n,
            p.theta,
            h.norm(&p.y)?,
            p.stationarity_residual,
            p.step_bound.map_or("-".into(), |e| e.holds(1e-6).to_string())
        );
    }

    let l3 = SpaceSpec::lp(2, 3.0)?;
    let r = resolvent(&l3, &power_map(l3)?, 0.5, &PrimalVector::from([1.0, -2.0]), 1e-10, 10_000)?;
    println!("l_3^2 power map, t = 0.5: y = {:?}, residual {:.2e}, {} inner steps", r.y.as_slice(), r.residual, r.inner_iterations);
    Ok(())
}
