//! Lorentz `L^{p,q}` norms of finite step functions.
//!
//! With `f*` the decreasing rearrangement,
//! `‖f‖_{p,q}^q = (q/p) ∫₀^∞ (t^{1/p} f*(t))^q dt/t = q ∫₀^∞ (λ μ_f(λ)^{1/p})^q dλ/λ`,
//! so that `‖f‖_{p,p} = ‖f‖_p` and the indicator of a set of measure `m` has norm `m^{1/p}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A nonnegative step function given by `(measure, value)` pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pieces: Vec<(f64, f64)>,
}

impl StepFunction {
    pub fn new(pieces: Vec<(f64, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return invalid("step function has no pieces");
        }
        for &(m, v) in &pieces {
            if !(m > 0.0 && m.is_finite()) {
                return invalid(format!("piece measure {m} must be positive and finite"));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("piece value {v} must be nonnegative and finite"));
            }
        }
        Ok(Self { pieces })
    }

    pub fn indicator(measure: f64) -> Result<Self> {
        Self::new(vec![(measure, 1.0)])
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    /// `(value, cumulative measure)` of the decreasing rearrangement, equal values merged
    /// and zero values dropped.
    pub fn rearrangement(&self) -> Vec<(f64, f64)> {
        let mut sorted: Vec<(f64, f64)> =
            self.pieces.iter().filter(|p| p.1 > 0.0).copied().collect();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        let mut cumulative = 0.0;
        for (m, v) in sorted {
            cumulative += m;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = cumulative,
                _ => out.push((v, cumulative)),
            }
        }
        out
    }

    /// `μ_f(λ) = |{|f| > λ}|`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.1 > lambda)
            .map(|p| p.0)
            .sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.pieces
            .iter()
            .map(|&(m, v)| m * v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Multiplies every measure by `lambda`.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        Self::new(self.pieces.iter().map(|&(m, v)| (m * lambda, v)).collect())
    }

    /// Pointwise product of two functions on the same decomposition.
    pub fn product(&self, other: &StepFunction) -> Result<Self> {
        if self.pieces.len() != other.pieces.len()
            || self
                .pieces
                .iter()
                .zip(&other.pieces)
                .any(|(a, b)| a.0 != b.0)
        {
            return invalid("step functions are not on the same decomposition");
        }
        Self::new(
            self.pieces
                .iter()
                .zip(&other.pieces)
                .map(|(a, b)| (a.0, a.1 * b.1))
                .collect(),
        )
    }

    /// Random function with `count` pieces, measures in `[0.05, 2)` and values in `[0, 1)`.
    pub fn random(rng: &mut impl Rng, count: usize) -> Self {
        let pieces = (0..count)
            .map(|_| (rng.gen_range(0.05..2.0), rng.gen_range(0.0..1.0)))
            .collect();
        Self::new(pieces).expect("random pieces are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzExponents {
    pub p: f64,
    /// `f64::INFINITY` selects weak `L^p`.
    pub q: f64,
}

impl LorentzExponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return invalid(format!("Lorentz p = {p} must be positive and finite"));
        }
        if !(q > 0.0) {
            return invalid(format!("Lorentz q = {q} must be positive or infinite"));
        }
        Ok(Self { p, q })
    }

    pub fn weak(p: f64) -> Result<Self> {
        Self::new(p, f64::INFINITY)
    }
}

/// `‖f‖_{L^{p,q}}`, summed exactly over the breakpoints of the rearrangement.
pub fn lorentz_norm(f: &StepFunction, exps: LorentzExponents) -> f64 {
    let LorentzExponents { p, q } = exps;
    let levels = f.rearrangement();
    if q.is_infinite() {
        return levels
            .iter()
            .map(|&(v, c)| v * c.powf(1.0 / p))
            .fold(0.0, f64::max);
    }
    let e = q / p;
    let mut prev: f64 = 0.0;
    let mut sum = 0.0;
    for &(v, c) in &levels {
        // c^e - prev^e without cancellation.
        let growth = if prev == 0.0 {
            c.powf(e)
        } else {
            prev.powf(e) * (e * ((c - prev) / prev).ln_1p()).exp_m1()
        };
        sum += v.powf(q) * growth;
        prev = c;
    }
    sum.powf(1.0 / q)
}

/// Result of one Hölder-in-Lorentz comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub target: LorentzExponents,
    pub product_norm: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    pub ratio: f64,
}

fn reciprocal_sum(a: f64, b: f64) -> f64 {
    1.0 / (1.0 / a + 1.0 / b)
}

/// Exponents `(p, q)` with `1/p = 1/p1 + 1/p2`, `1/q = 1/q1 + 1/q2`.
pub fn holder_target(e1: LorentzExponents, e2: LorentzExponents) -> LorentzExponents {
    LorentzExponents {
        p: reciprocal_sum(e1.p, e2.p),
        q: reciprocal_sum(e1.q, e2.q),
    }
}

/// `‖fg‖_{p,q} / (‖f‖_{p1,q1} ‖g‖_{p2,q2})` for the given target exponents.
pub fn holder_lorentz_check(
    f: &StepFunction,
    g: &StepFunction,
    e1: LorentzExponents,
    e2: LorentzExponents,
    target: LorentzExponents,
) -> Result<HolderReport> {
    let expected = holder_target(e1, e2);
    let close = |a: f64, b: f64| {
        (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-12 * a.abs().max(1.0)
    };
    if !close(expected.p, target.p) || !close(expected.q, target.q) {
        return invalid(format!(
            "exponents violate 1/p = 1/p1 + 1/p2, 1/q = 1/q1 + 1/q2 (expected ({}, {}), got ({}, {}))",
            expected.p, expected.q, target.p, target.q
        ));
    }
    let product = f.product(g)?;
    let product_norm = lorentz_norm(&product, target);
    let f_norm = lorentz_norm(f, e1);
    let g_norm = lorentz_norm(g, e2);
    let denom = f_norm * g_norm;
    let ratio = if denom > 0.0 {
        product_norm / denom
    } else {
        0.0
    };
    Ok(HolderReport {
        target,
        product_norm,
        f_norm,
        g_norm,
        ratio,
    })
}

/// Largest Hölder ratio over `trials` random pairs of `pieces`-step functions
/// sharing one decomposition. Each pair is pushed towards a larger ratio by
/// a short coordinate search, so the maximum reflects the extremal shapes
/// rather than sampling luck.
pub fn holder_corpus_max(
    rng: &mut impl Rng,
    trials: usize,
    pieces: usize,
    e1: LorentzExponents,
    e2: LorentzExponents,
) -> Result<f64> {
    let target = holder_target(e1, e2);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let f = StepFunction::random(rng, pieces);
        let g_values: Vec<(f64, f64)> = f
            .pieces()
            .iter()
            .map(|&(m, _)| (m, rng.gen_range(0.0..1.0)))
            .collect();
        let g = StepFunction::new(g_values)?;
        let (f, g) = climb(f, g, e1, e2, target, rng)?;
        best = best.max(holder_lorentz_check(&f, &g, e1, e2, target)?.ratio);
    }
    Ok(best)
}

fn climb(
    mut f: StepFunction,
    mut g: StepFunction,
    e1: LorentzExponents,
    e2: LorentzExponents,
    target: LorentzExponents,
    rng: &mut impl Rng,
) -> Result<(StepFunction, StepFunction)> {
    let mut current = holder_lorentz_check(&f, &g, e1, e2, target)?.ratio;
    let mut step = 0.5;
    for _ in 0..60 {
        let mut improved = false;
        for k in 0..f.pieces.len() {
            for which in 0..3 {
                let factor = if rng.gen_bool(0.5) {
                    1.0 + step
                } else {
                    1.0 / (1.0 + step)
                };
                let (mut f2, mut g2) = (f.clone(), g.clone());
                match which {
                    0 => {
                        f2.pieces[k].0 *= factor;
                        g2.pieces[k].0 *= factor;
                    }
                    1 => f2.pieces[k].1 *= factor,
                    _ => g2.pieces[k].1 *= factor,
                }
                let r = holder_lorentz_check(&f2, &g2, e1, e2, target)?.ratio;
                if r > current {
                    current = r;
                    f = f2;
                    g = g2;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((f, g))
}
