//! `‖r^{(n-2)/2} J_{(n-2)/2}(rs)‖_{L^q(dr)}` across the critical exponent `q = 2n/(n-1)`.

use conelab::norms::weighted_bessel_norm;

fn main() -> conelab::error::Result<()> {
    let n = 3;
    for q in [2.6, 2.8, 3.0, 3.2, 3.4, 4.0] {
        let r = weighted_bessel_norm(n, q, 1.0, 1e4)?;
        println!(
            "q = {q}: norm {:.6}  increment ratio {:.4}  {}",
            r.norm.value,
            r.increment_ratio,
            if r.divergent {
                "divergent"
            } else {
                "convergent"
            }
        );
    }
    let q = 4.0;
    let base = weighted_bessel_norm(n, q, 1.0, 1e4)?.norm.value;
    for s in [0.5, 2.0, 4.0] {
        let v = weighted_bessel_norm(n, q, s, 1e4)?.norm.value;
        let want = s.powf((n as f64 - 2.0) / 2.0 - n as f64 / q);
        println!("s = {s}: ratio {:.8}  scaling law {want:.8}", v / base);
    }
    Ok(())
}
