//! Thin radial bands `1_{[1, 1+δ]}`: how both sides of the extension estimate scale in `δ`.

use conelab::dyadic::Dyadic;
use conelab::experiments::{band_sharpness, BandOptions, ExponentTriple};

fn main() -> conelab::error::Result<()> {
    let exps = ExponentTriple::new(3, 2.0, 4.0)?;
    let deltas: Vec<Dyadic> = (0..=6).map(|j| Dyadic(-j)).collect();
    let start = std::time::Instant::now();
    let report = band_sharpness(&deltas, &exps, &BandOptions::default())?;
    for p in &report.points {
        println!(
            "δ = {:<5} j_max = {:>2}  lhs = {:.6e}  rhs = {:.6e}  flags {:?}",
            p.delta.to_string(),
            p.j_max,
            p.lhs,
            p.rhs,
            p.flags
        );
    }
    println!(
        "lhs exponent {:.4}, rhs exponent {:.4}, heuristic {:.4}",
        report.lhs_fit.slope,
        report.rhs_fit.slope,
        1.0 - 1.0 / exps.q
    );
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
