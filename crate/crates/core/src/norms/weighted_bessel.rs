//! `‖r^{b} J_{(n-2)/2}(rs)‖_{L^q_r(0, r_max)}` with `b = -(n-2)/2 + (n-1)/q`.
//!
//! In `u = rs` the norm is `s^{(n-2)/2 - n/q}` times an `s`-independent integral.
//! Each doubling of `r_max` adds a block whose size changes by roughly
//! `2^{n - (n-1)q/2}`, so the integral converges exactly when `q > 2n/(n-1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, BesselOrder};
use crate::error::{invalid, Result};
use crate::norms::{NormResult, TruncationReport};
use crate::quadrature::{try_integrate, AdaptiveOptions};
use crate::special::gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBesselOptions {
    pub rel_tol: f64,
    /// Geometric ratio of block increments at or above which the norm is flagged divergent.
    pub divergence_ratio: f64,
    /// Number of trailing block ratios averaged for the divergence test.
    pub ratio_window: usize,
}

impl Default for WeightedBesselOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            divergence_ratio: 0.9,
            ratio_window: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedBesselResult {
    /// Truncated norm plus the asymptotic tail when convergent; the truncated norm otherwise.
    pub norm: NormResult,
    /// `∫₀^{r_max} r^{bq} |J(rs)|^q dr`.
    pub truncated_power: f64,
    /// Estimate of `∫_{r_max}^∞`; infinite when divergent.
    pub tail_power: f64,
    /// Contribution of `[r_max/2^{k+1}, r_max/2^k]`, outermost first.
    pub increments: Vec<f64>,
    /// Geometric mean of the trailing increment ratios.
    pub increment_ratio: f64,
    pub divergent: bool,
}

/// `(1/π) ∫₀^π |sin θ|^q dθ`.
fn mean_abs_sine_power(q: f64) -> f64 {
    gamma((q + 1.0) / 2.0) / (PI.sqrt() * gamma(q / 2.0 + 1.0))
}

pub fn weighted_bessel_norm(n: usize, q: f64, s: f64, r_max: f64) -> Result<WeightedBesselResult> {
    weighted_bessel_norm_with(n, q, s, r_max, &WeightedBesselOptions::default())
}

pub fn weighted_bessel_norm_with(
    n: usize,
    q: f64,
    s: f64,
    r_max: f64,
    opts: &WeightedBesselOptions,
) -> Result<WeightedBesselResult> {
    let order = BesselOrder::for_dimension(n)?;
    if !(q > 0.0 && q.is_finite()) {
        return invalid(format!("q = {q} must be positive and finite"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return invalid(format!("s = {s} must be positive"));
    }
    let u_max = s * r_max;
    if !(u_max >= 8.0 && r_max.is_finite()) {
        return invalid(format!(
            "r_max = {r_max} too small to resolve the tail at s = {s}"
        ));
    }
    let nf = n as f64;
    let weight = (-(nf - 2.0) / 2.0 + (nf - 1.0) / q) * q;
    let quad = AdaptiveOptions {
        max_panel: PI / 4.0,
        rel_tol: opts.rel_tol,
        order: 16,
        ..AdaptiveOptions::default()
    };
    let integrand = |u: f64| -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        let j = bessel_j(order, u)?.value.re.abs();
        Ok(u.powf(weight) * j.powf(q))
    };

    // Blocks [u_max/2^{k+1}, u_max/2^k] down to u <= 1, then [0, edge].
    let mut edges = vec![u_max];
    while *edges.last().unwrap() > 1.0 {
        let next = edges.last().unwrap() * 0.5;
        edges.push(next);
    }
    let mut increments = Vec::with_capacity(edges.len());
    let mut abs_error = 0.0;
    for w in edges.windows(2) {
        let res = try_integrate(integrand, w[1], w[0], &quad)?;
        increments.push(res.value);
        abs_error += res.abs_error;
    }
    let head = try_integrate(integrand, 0.0, *edges.last().unwrap(), &quad)?;
    abs_error += head.abs_error;
    let u_power: f64 = increments.iter().sum::<f64>() + head.value;

    let window = opts.ratio_window.min(increments.len() - 1).max(1);
    let log_ratio: f64 = (0..window)
        .map(|k| (increments[k] / increments[k + 1]).ln())
        .sum::<f64>()
        / window as f64;
    let increment_ratio = log_ratio.exp();
    let divergent = increment_ratio >= opts.divergence_ratio;

    // Undo u = rs: ∫₀^{r_max} r^{w} |J(rs)|^q dr = s^{-w-1} ∫₀^{u_max} u^{w} |J(u)|^q du.
    let jacobian = s.powf(-weight - 1.0);
    let truncated_power = jacobian * u_power;
    // Tail from the envelope |J(u)|^q ≈ (2/(πu))^{q/2} |sin(u - φ)|^q.
    let exponent = weight - q / 2.0;
    let tail_power = if divergent || exponent >= -1.0 {
        f64::INFINITY
    } else {
        jacobian * mean_abs_sine_power(q) * (2.0 / PI).powf(q / 2.0) * u_max.powf(exponent + 1.0)
            / (-exponent - 1.0)
    };
    let (power, power_err) = if tail_power.is_finite() {
        // The envelope is accurate to O(1/u); allow the whole O(1/u) share as error.
        (
            truncated_power + tail_power,
            jacobian * abs_error + tail_power * 4.0 / u_max,
        )
    } else {
        (truncated_power, jacobian * abs_error)
    };
    let value = power.powf(1.0 / q);
    Ok(WeightedBesselResult {
        norm: NormResult {
            value,
            abs_error: value * power_err / (q * power),
            truncation: TruncationReport::default(),
        },
        truncated_power,
        tail_power,
        increments,
        increment_ratio,
        divergent,
    })
}
