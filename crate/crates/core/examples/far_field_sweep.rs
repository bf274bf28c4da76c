//! Annulus norms of the extension of `1_{[1,2]}` and their log-log slope.
//!
//! Usage: `cargo run --release --example far_field_sweep -- [n] [q] [lo] [hi] [full|main|error]`

use conelab::dyadic::DyadicRange;
use conelab::experiments::{dyadic_sweep, fit_slope, ExponentTriple, SweepOptions};
use conelab::extension::Term;
use conelab::profile::RadialProfile;

fn main() -> conelab::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "3").parse().expect("n");
    let q: f64 = arg(1, "4").parse().expect("q");
    let lo: i32 = arg(2, "3").parse().expect("lo");
    let hi: i32 = arg(3, "9").parse().expect("hi");
    let term: Term = arg(4, "full").parse()?;

    let exps = ExponentTriple::new(n, 2.0, q)?;
    let start = std::time::Instant::now();
    let points = dyadic_sweep(
        &RadialProfile::unit_constant(),
        &exps,
        DyadicRange::new(lo, hi)?,
        term,
        &SweepOptions::default(),
    )?;
    for p in &points {
        match &p.norm {
            Some(norm) => println!(
                "R = {:>5}  norm = {:.6e}  ± {:.1e}",
                p.r, norm.value, norm.abs_error
            ),
            None => println!(
                "R = {:>5}  {}",
                p.r,
                p.message.as_deref().unwrap_or("failed")
            ),
        }
    }
    let fit = fit_slope(&points)?;
    let expected = match term {
        Term::Error => -(n as f64 + 1.0) / 2.0 + n as f64 / q,
        _ if lo >= 1 => exps.far_field_exponent(),
        _ => exps.near_field_exponent(),
    };
    println!(
        "slope {:.4} (expected {:.4}), max residual {:.2e}",
        fit.slope, expected, fit.max_residual
    );
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
