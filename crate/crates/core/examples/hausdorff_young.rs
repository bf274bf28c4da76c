//! Ratios `‖ĝ‖_{p'} / ‖g‖_{L^{p,p'}}` for a Gaussian and for random corpora of step functions.
//!
//! `cargo run --release --example hausdorff_young -- search [stacks] [restarts]` looks for the
//! largest ratio over sums of four indicators: every centred stack of nested intervals on a
//! half-resolution grid, endpoint hill-climbs from the best `stacks` of them, then climbs from
//! `restarts` random starts. This is how the recorded corpus maximum was found (defaults 5 and 4,
//! a few minutes on one core).

use conelab::norms::fourier::{
    hausdorff_young_check, hausdorff_young_check_fn, hausdorff_young_climb,
    hausdorff_young_corpus_max, indicator_sum, random_intervals, CORPUS_CELLS,
};
use conelab::norms::HausdorffYoungOptions;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Nested intervals of the given widths in half-resolution cells, centred on the grid.
fn stack(widths: &[usize]) -> Vec<(usize, usize)> {
    let half = CORPUS_CELLS / 2;
    widths
        .iter()
        .map(|&w| {
            let lo = (half - w) / 2;
            (2 * lo, 2 * (lo + w))
        })
        .collect()
}

fn search(p: f64, keep: usize, restarts: usize) -> conelab::error::Result<()> {
    let half = CORPUS_CELLS / 2;
    let mut scored = Vec::new();
    for a in 1..=half {
        for b in 1..=a {
            for c in 1..=b {
                for d in 1..=c {
                    let intervals = stack(&[a, b, c, d]);
                    let ratio = hausdorff_young_check(&indicator_sum(&intervals)?, p)?.ratio;
                    scored.push((ratio, intervals));
                }
            }
        }
    }
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    println!(
        "{} stacks, best {:.9} at {:?}",
        scored.len(),
        scored[0].0,
        scored[0].1
    );
    let mut best = 0.0f64;
    for (ratio, start) in scored.into_iter().take(keep) {
        let (climbed, at) = hausdorff_young_climb(start, p)?;
        best = best.max(climbed);
        println!("stack {ratio:.9} climbs to {climbed:.9} at {at:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for k in 0..restarts {
        let (climbed, at) = hausdorff_young_climb(random_intervals(&mut rng, 4), p)?;
        best = best.max(climbed);
        println!("random start {k} climbs to {climbed:.9} at {at:?}");
    }
    println!("largest ratio found: {best:.12}");
    Ok(())
}

fn main() -> conelab::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.first().map(String::as_str) == Some("search") {
        let keep = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
        let restarts = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(4);
        return search(1.5, keep, restarts);
    }
    let gauss = |x: f64| (-x * x / 2.0).exp();
    for p in [1.25, 1.5, 2.0] {
        let r =
            hausdorff_young_check_fn(gauss, -8.0, 8.0, 256, p, &HausdorffYoungOptions::default())?;
        println!(
            "gaussian  p = {p:<4}  ratio {:.6}  (p = 2 gives {:.6})",
            r.ratio, r.plancherel_constant
        );
    }
    for seed in 1..=4u64 {
        let start = std::time::Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let max = hausdorff_young_corpus_max(&mut rng, 200, 4, 1.5)?;
        println!(
            "seed {seed}  corpus max at p = 1.5: {max:.6}  ({:.1?})",
            start.elapsed()
        );
    }
    Ok(())
}
