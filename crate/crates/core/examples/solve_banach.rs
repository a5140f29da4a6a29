//! Zero of the power map in ℓ₃⁵ with the dual-space iteration, and the same
//! problem in Hilbert space solved by both kernels side by side.
//!
//!     cargo run --release --example solve_banach

use monozero::operators::power_map;
use monozero::solver::{solve_zero, solve_zero_hilbert, StopRule, TraceOptions};
use monozero::{PowerSchedule, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let space = SpaceSpec::lp(5, 3.0)?;
    let op = power_map(space)?;
    let x1 = PrimalVector::new(vec![1.0; 5]);
    let schedule = PowerSchedule::new(0.5, 0.1, 1e-3, 0.8)?;
    let (report, _) = solve_zero(&space, &op, &x1, &schedule, &StopRule::max_iter(1_000_000), &TraceOptions::default())?;
    println!("l_3^5: {} after {} steps, |x|_3 = {:.3e}", report.status.as_str(), report.iterations, space.norm(&report.final_point)?);

    let h = SpaceSpec::hilbert(5)?;
    let op = power_map(h)?;
    let stop = StopRule::max_iter(1000);
    let opts = TraceOptions::default().with_coords();
    let (_, a) = solve_zero(&h, &op, &x1, &schedule, &stop, &opts)?;
    let (_, b) = solve_zero_hilbert(&h, &op, &x1, &schedule, &stop, &opts)?;
    let worst = a
        .rows
        .iter()
        .zip(&b.rows)
        .flat_map(|(r, s)| r.coords.iter().flatten().zip(s.coords.iter().flatten()).map(|(u, v)| (u - v).abs()))
        .fold(0.0_f64, f64::max);
    println!("Hilbert: dual-space and direct kernels differ by at most {worst:.3e} over 1000 steps");
    Ok(())
}
