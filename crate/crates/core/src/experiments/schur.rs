//! Dyadic kernel sums `Σ_K K^{α(K)}`.
//!
//! The two-parameter kernel `(RM)^{α(RM)}` only depends on the product, so its row and
//! column sums are the same one-parameter sum over dyadic `K = RM`.

use serde::{Deserialize, Serialize};

use super::{alpha, ExponentTriple};
use crate::dyadic::Dyadic;

/// `K^{α(K)}`.
pub fn kernel_term(n: usize, q: f64, k: Dyadic) -> f64 {
    k.value().powf(alpha(n, q, k))
}

/// `(RM)^{α(RM)}` evaluated from the pair.
pub fn kernel_term_pair(n: usize, q: f64, r: Dyadic, m: Dyadic) -> f64 {
    let k = r.value() * m.value();
    let kd = Dyadic::from_value(k).expect("products of dyadic numbers are dyadic");
    k.powf(alpha(n, q, kd))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurResult {
    pub range: u32,
    /// `S_L = Σ_{|log2 K| <= L}` for `L = 0..=range`.
    pub partial_sums: Vec<f64>,
    /// `S_L - S_{L-1}` for `L = 1..=range`.
    pub increments: Vec<f64>,
    /// Geometric mean of the trailing increment ratios.
    pub increment_ratio: f64,
    /// Geometric tail estimate beyond the range; infinite when divergent.
    pub tail_estimate: f64,
    pub convergent: bool,
}

impl SchurResult {
    pub fn truncated(&self) -> f64 {
        *self.partial_sums.last().unwrap()
    }

    /// Truncated sum plus the tail estimate.
    pub fn total(&self) -> f64 {
        self.truncated() + self.tail_estimate
    }
}

const RATIO_WINDOW: usize = 3;

/// Partial sums over `2^{-range} <= K <= 2^{range}`.
///
/// The sum is declared convergent when the trailing increments decay geometrically
/// and the extrapolated tail does not exceed what has already been summed.
pub fn schur_sum(exps: &ExponentTriple, range: u32) -> SchurResult {
    let term = |k: i32| kernel_term(exps.n, exps.q, Dyadic(k));
    let mut partial_sums = vec![term(0)];
    let mut increments = Vec::with_capacity(range as usize);
    for l in 1..=range as i32 {
        let inc = term(l) + term(-l);
        increments.push(inc);
        partial_sums.push(partial_sums.last().unwrap() + inc);
    }
    let window = RATIO_WINDOW.min(increments.len().saturating_sub(1));
    let increment_ratio = if window == 0 {
        f64::NAN
    } else {
        let tail = &increments[increments.len() - window - 1..];
        let log: f64 = tail.windows(2).map(|w| (w[1] / w[0]).ln()).sum::<f64>() / window as f64;
        log.exp()
    };
    let last = *partial_sums.last().unwrap();
    let tail_estimate = if increment_ratio < 1.0 {
        increments.last().unwrap() * increment_ratio / (1.0 - increment_ratio)
    } else {
        f64::INFINITY
    };
    let convergent = tail_estimate <= last;
    SchurResult {
        range,
        partial_sums,
        increments,
        increment_ratio,
        tail_estimate: if convergent {
            tail_estimate
        } else {
            f64::INFINITY
        },
        convergent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triple(n: usize, q: f64) -> ExponentTriple {
        ExponentTriple::new(n, 2.0, q).unwrap()
    }

    #[test]
    fn three_four_converges_geometrically() {
        let s = schur_sum(&triple(3, 4.0), 40);
        assert!(s.convergent);
        assert!((s.increment_ratio - 2f64.powf(-0.25)).abs() < 1e-3);
        // Closed form: Σ_{k>=1} 2^{-k/4} + Σ_{k>=0} 2^{-k/2}.
        let a = 2f64.powf(-0.25);
        let b = 2f64.powf(-0.5);
        let want = a / (1.0 - a) + 1.0 / (1.0 - b);
        assert!((s.total() - want).abs() < 1e-6 * want);
    }

    #[test]
    fn three_three_diverges() {
        let s = schur_sum(&triple(3, 3.0), 40);
        assert!(!s.convergent);
        assert!(s.total().is_infinite());
        for short in [4, 10, 20] {
            assert!(
                !schur_sum(&triple(3, 3.0), short).convergent,
                "range {short}"
            );
        }
        let inc = &s.increments;
        assert!((inc[inc.len() - 1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_five_matches_geometric_sums() {
        let s = schur_sum(&triple(2, 5.0), 40);
        assert!(s.convergent);
        // K >= 2: 2^{-k/10}; K <= 1: 2^{-k/5}.
        let geo = |r: f64, from: i32| (from..=40).map(|k| r.powi(k)).sum::<f64>();
        let want = geo(2f64.powf(-0.1), 1) + geo(2f64.powf(-0.2), 0);
        assert!((s.truncated() - want).abs() < 1e-12 * want);
        assert!(
            (s.truncated() - 20.760_685_121_139_133).abs() < 1e-9,
            "{}",
            s.truncated()
        );
    }

    #[test]
    fn product_collapse_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = Dyadic(rng.gen_range(-20..=20));
            let m = Dyadic(rng.gen_range(-20..=20));
            let q = rng.gen_range(2.5..8.0);
            let n = rng.gen_range(2..=6);
            assert_eq!(
                kernel_term_pair(n, q, r, m),
                kernel_term(n, q, Dyadic(r.0 + m.0))
            );
        }
    }
}
