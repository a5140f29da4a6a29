//! Validation report for the default schedule and for one that violates the
//! divergent-sum condition.
//!
//!     cargo run --example schedule_check

use monozero::PowerSchedule;

fn main() -> monozero::Result<()> {
    let default = PowerSchedule::default();
    println!("{default:?}");
    print!("{}", default.validate(1_000_000)?.render());
    let bad = PowerSchedule::new(0.9, 0.8, 1e-3, 0.4)?;
    println!("\n{bad:?}");
    let report = bad.validate(1_000_000)?;
    print!("{}", report.render());
    println!("admissible: {}", report.admissible());
    Ok(())
}
