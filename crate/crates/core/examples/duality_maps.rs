//! Norms, the duality map and its inverse on a few ℓ_s spaces.
//!
//!     cargo run --example duality_maps

use monozero::space::{pair, PrimalVector, SpaceSpec};

fn main() -> monozero::Result<()> {
    let x = PrimalVector::from([3.0, -4.0, 0.5]);
    for (s, p) in [(2.0, 2.0), (3.0, 3.0), (1.5, 1.5), (3.0, 2.0)] {
        let space = SpaceSpec::new(3, s, p)?;
        let jx = space.duality_map(&x);
        let back = space.inverse_duality_map(&jx);
        let nx = space.norm(&x)?;
        println!("s = {s}, p = {p}");
        println!("  |x|_s          = {nx:.12}");
        println!("  J_p x          = {:?}", jx.as_slice());
        println!("  <J_p x, x>     = {:.12}   |x|^p     = {:.12}", pair(&jx, &x)?, nx.powf(p));
        println!("  |J_p x|_*      = {:.12}   |x|^(p-1) = {:.12}", space.dual_norm(&jx)?, nx.powf(p - 1.0));
        println!("  round trip err = {:.3e}", back.sub(&x).max_abs());
    }
    Ok(())
}
