//! Zero of a strongly monotone linear map in R² with the Hilbert-space form
//! of the anchored iteration, tracking φ_2 to the known zero.
//!
//!     cargo run --release --example solve_linear

use monozero::operators::{coupled_matrix, linear_map};
use monozero::solver::{solve_zero_hilbert, StopRule, TraceOptions};
use monozero::{DualCovector, PowerSchedule, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let space = SpaceSpec::hilbert(2)?;
    let op = linear_map(space, coupled_matrix(), DualCovector::zeros(2))?;
    let x1 = PrimalVector::from([10.0, -10.0]);
    let stop = StopRule::new(1e-3, 0.0, 200_000)?;
    let opts = TraceOptions::default().with_reference(PrimalVector::zeros(2));

    let (report, trace) = solve_zero_hilbert(&space, &op, &x1, &PowerSchedule::default(), &stop, &opts)?;
    println!("status     {}", report.status.as_str());
    println!("iterations {}", report.iterations);
    println!("final x    {:?}", report.final_point.as_slice());
    println!("|x_final|  {:.3e}", space.norm(&report.final_point)?);
    for tol in [1e-2, 1e-4, 1e-6, 1e-8] {
        match trace.first_within_phi(tol) {
            Some(n) => println!("phi(0, x_n) <= {tol:.0e} first at n = {n}"),
            None => println!("phi(0, x_n) <= {tol:.0e} not reached"),
        }
    }
    Ok(())
}
