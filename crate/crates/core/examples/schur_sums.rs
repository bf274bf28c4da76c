//! Dyadic Schur sums `Σ_K K^{α(K)}` below, at and above the critical exponent.

use conelab::experiments::{schur_sum, ExponentTriple};

fn main() -> conelab::error::Result<()> {
    for (n, q) in [(3, 4.0), (2, 5.0), (3, 3.0), (4, 2.5), (4, 3.0)] {
        let exps = ExponentTriple::new(n, 2.0, q)?;
        let s = schur_sum(&exps, 40);
        println!(
            "n = {n} q = {q}: truncated {:.9}  ratio {:.6}  total {:.9}  {}",
            s.truncated(),
            s.increment_ratio,
            s.total(),
            if s.convergent {
                "convergent"
            } else {
                "divergent"
            }
        );
    }
    Ok(())
}
