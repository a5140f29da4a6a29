//! The Lyapunov functional φ_p, its dual form V_p, and the φ_p sandwich
//! bounds, including the point where the upper bound breaks for p > 2.
//!
//!     cargo run --example lyapunov

use monozero::geometry::{shift_residual, power_gap_residual, three_point_residual, phi_bounds_check, phi_p, v_p, v_p_via_phi};
use monozero::space::{DualCovector, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let space = SpaceSpec::lp(2, 3.0)?;
    let x = PrimalVector::from([1.0, 2.0]);
    let y = PrimalVector::from([-0.5, 1.5]);
    let f = DualCovector::from([0.25, -1.0]);

    println!("phi_3(x, y)      = {:.12}", phi_p(&space, &x, &y)?);
    println!("phi_3(x, x)      = {:.3e}", phi_p(&space, &x, &x)?);
    println!("V_3(x, f)        = {:.12}", v_p(&space, &x, &f)?);
    println!("phi_3(x, J^-1 f) = {:.12}", v_p_via_phi(&space, &x, &f)?);

    let z = PrimalVector::from([0.3, -0.7]);
    println!("slack of the three supporting inequalities:");
    println!("  {:.6e}", shift_residual(&space, &x, &f, &DualCovector::from([1.0, 1.0]))?.residual);
    println!("  {:.6e}", power_gap_residual(&space, &x, &y)?.residual);
    println!("  {:.6e}", three_point_residual(&space, &x, &y, &z)?.residual);

    println!("sandwich |x|-|y| <= phi <= |x|+|y| (p-th powers), x = 0:");
    for p in [2.0, 3.0, 4.0] {
        let s = SpaceSpec::lp(2, p)?;
        let b = phi_bounds_check(&s, &PrimalVector::zeros(2), &y)?;
        println!(
            "  p = {p}: lower {:.4} <= phi {:.4} <= upper {:.4}?  lower ok {}, upper ok {}",
            b.lower, b.phi, b.upper, b.lower_ok, b.upper_ok
        );
    }
    Ok(())
}
