//! The extension of a radial profile split into its main and error terms.
//!
//! Usage: `decomposition [n] [t]`, defaults `n = 5`, `t = 1.5`.

use conelab::extension::{error_term, extension_direct, main_term, SpacetimePoint};
use conelab::profile::{ProfileShape, RadialProfile};

fn main() -> conelab::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(5);
    let t: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.5);
    let bump = RadialProfile::new(ProfileShape::SmoothBump, (1.0, 2.0))?;
    println!("n = {n}, t = {t}, smooth bump on [1, 2]");
    for r in [1.0, 2.0, 5.0, 10.0, 50.0, 200.0] {
        let pt = SpacetimePoint::new(t, r, n)?;
        let direct = extension_direct(&bump, pt)?.value;
        let main = main_term(&bump, pt)?.value;
        let error = error_term(&bump, pt)?.value;
        println!(
            "r = {r:>5}  u = {direct:.6e}  main = {main:.6e}  error = {error:.3e}  residual {:.1e}",
            (direct - main - error).norm()
        );
    }
    Ok(())
}
