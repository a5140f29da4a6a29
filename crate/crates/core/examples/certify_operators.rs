//! Empirical strong-monotonicity certificates and a coercivity probe.
//!
//!     cargo run --example certify_operators

use monozero::operators::{certify_strong_monotonicity, coercivity_probe, coupled_matrix, linear_map, power_map};
use monozero::space::{DualCovector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let h2 = SpaceSpec::hilbert(2)?;
    let g = linear_map(h2, coupled_matrix(), DualCovector::zeros(2))?;
    let cert = certify_strong_monotonicity(&g, 2.0, 10_000, 10.0, 1)?;
    println!("linear map G = [[8, -5], [5, 13]]: eta_hat = {:.9} (claim {})", cert.eta_hat, g.eta_claim());

    for p in [2.0, 3.0, 4.0] {
        let op = power_map(SpaceSpec::new(3, 2.0, p)?)?;
        let cert = certify_strong_monotonicity(&op, p, 10_000, 10.0, 2)?;
        println!("power map, p = {p}: eta_hat = {:.6} (claim {})", cert.eta_hat, op.eta_claim());
        if let Some(note) = op.eta_note() {
            println!("  note: {note}");
        }
    }

    let op = power_map(SpaceSpec::new(3, 2.0, 3.0)?)?;
    println!("coercivity <x, Tx>/|x| on spheres, p = 3:");
    for row in coercivity_probe(&op, &[1.0, 10.0, 100.0, 1000.0], 64, 3)? {
        println!("  r = {:>6}: min {:.6e}", row.radius, row.min_quotient);
    }
    Ok(())
}
