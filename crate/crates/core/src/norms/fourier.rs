//! The Hausdorff–Young inequality in its Lorentz-strengthened dual form,
//! `‖ĝ‖_{p'} ≲ ‖g‖_{L^{p,p'}}`, with `ĝ(ξ) = ∫ g(x) e^{-ixξ} dx`.
//!
//! Inputs are step functions on a uniform grid, whose transform is known in
//! closed form; only the `ξ`-integral is discretized.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::norms::lorentz::{lorentz_norm, LorentzExponents, StepFunction};
use crate::quadrature::{integrate, AdaptiveOptions};

/// Real step function with value `values[k]` on `[x0 + k dx, x0 + (k+1) dx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return invalid(format!("bad grid x0 = {x0}, dx = {dx}"));
        }
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return invalid("sampled function needs finite values");
        }
        Ok(Self { x0, dx, values })
    }

    /// Midpoint samples of `f` on `cells` equal cells of `[a, b]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(b > a) || cells == 0 {
            return invalid(format!(
                "bad sampling interval [{a}, {b}] with {cells} cells"
            ));
        }
        let dx = (b - a) / cells as f64;
        Self::new(
            a,
            dx,
            (0..cells).map(|k| f(a + (k as f64 + 0.5) * dx)).collect(),
        )
    }

    /// Sum of `count` indicators of random subintervals of `[0, cells·dx)`, aligned to the grid.
    pub fn random_indicators(
        rng: &mut impl Rng,
        count: usize,
        cells: usize,
        dx: f64,
    ) -> Result<Self> {
        let mut values = vec![0.0; cells];
        for _ in 0..count {
            let lo = rng.gen_range(0..cells);
            let hi = rng.gen_range(lo + 1..=cells);
            for v in &mut values[lo..hi] {
                *v += 1.0;
            }
        }
        Self::new(0.0, dx, values)
    }

    pub fn as_step_function(&self) -> Result<StepFunction> {
        StepFunction::new(self.values.iter().map(|v| (self.dx, v.abs())).collect())
    }

    /// `ĝ(ξ)`, exact for the step function.
    pub fn transform(&self, xi: f64) -> Complex64 {
        let z = self.dx * xi;
        let half = 0.5 * z;
        let sinc = if half.abs() < 1e-8 {
            1.0 - half * half / 6.0
        } else {
            half.sin() / half
        };
        let cell = Complex64::from_polar(self.dx * sinc, -half);
        cell * self.phase_sum(xi)
    }

    /// `Σ_k v_k e^{-i x_k ξ}`.
    fn phase_sum(&self, xi: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, -self.dx * xi);
        let mut phase = Complex64::from_polar(1.0, -self.x0 * xi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &v) in self.values.iter().enumerate() {
            if k % 64 == 63 {
                phase = Complex64::from_polar(1.0, -(self.x0 + self.dx * k as f64) * xi);
            }
            acc += phase * v;
            phase *= step;
        }
        acc
    }

    /// `ξ^{p'} |ĝ(ξ)|^{p'}`, periodic with period `2π/dx`.
    fn periodic_part(&self, xi: f64, p_conj: f64) -> f64 {
        let chord = 2.0 * (0.5 * self.dx * xi).sin().abs();
        (chord * self.phase_sum(xi).norm()).powf(p_conj)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HausdorffYoungOptions {
    /// Initial cutoff `Ξ` in periods `2π/dx`.
    pub periods: usize,
    pub rel_tol: f64,
    /// Relative change under refinement above which the grid is rejected.
    pub refinement_gate: f64,
}

impl Default for HausdorffYoungOptions {
    fn default() -> Self {
        Self {
            periods: 4,
            rel_tol: 1e-8,
            refinement_gate: 5e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffYoungReport {
    pub p: f64,
    pub p_conj: f64,
    /// `‖ĝ‖_{L^{p'}}`.
    pub fourier_norm: f64,
    /// `‖g‖_{L^{p,p'}}`.
    pub lorentz_norm: f64,
    pub ratio: f64,
    /// `√(2π)`: the ratio at `p = 2` under this transform convention.
    pub plancherel_constant: f64,
    pub xi_max: f64,
    /// Share of `‖ĝ‖^{p'}` carried by the analytic tail `|ξ| > Ξ`.
    pub tail_fraction: f64,
    /// Relative change of the Fourier norm under refinement.
    pub refinement_change: f64,
}

/// `‖ĝ‖_{p'}^{p'}` with the cutoff at `periods` periods and panels of at most `max_panel`.
fn fourier_power(
    g: &SampledFunction,
    p_conj: f64,
    periods: usize,
    max_panel: f64,
    rel_tol: f64,
) -> (f64, f64) {
    let period = 2.0 * PI / g.dx;
    let xi_max = periods as f64 * period;
    let opts = AdaptiveOptions {
        max_panel,
        rel_tol,
        ..AdaptiveOptions::default()
    };
    let body = integrate(|xi| g.transform(xi).norm().powf(p_conj), 0.0, xi_max, &opts).value;
    // |ĝ|^{p'} = A(ξ) ξ^{-p'} with A periodic: replace A by its mean on the tail.
    let mean = integrate(|xi| g.periodic_part(xi, p_conj), 0.0, period, &opts).value / period;
    let tail = mean * xi_max.powf(1.0 - p_conj) / (p_conj - 1.0);
    // |ĝ(-ξ)| = |ĝ(ξ)| for real g.
    (2.0 * (body + tail), 2.0 * tail)
}

/// Ratio `‖ĝ‖_{p'} / ‖g‖_{L^{p,p'}}` for `1 < p <= 2`.
pub fn hausdorff_young_check(g: &SampledFunction, p: f64) -> Result<HausdorffYoungReport> {
    hausdorff_young_check_with(g, p, &HausdorffYoungOptions::default())
}

pub fn hausdorff_young_check_with(
    g: &SampledFunction,
    p: f64,
    opts: &HausdorffYoungOptions,
) -> Result<HausdorffYoungReport> {
    if !(p > 1.0 && p <= 2.0) {
        return invalid(format!("Hausdorff-Young needs 1 < p <= 2, got {p}"));
    }
    if g.values.iter().all(|&v| v == 0.0) {
        return invalid("Hausdorff-Young check of the zero function");
    }
    let p_conj = p / (p - 1.0);
    let width = g.dx * g.values.len() as f64;
    // |ĝ|^{p'} oscillates at frequencies up to the support width.
    let panel = (PI / (2.0 * width)).min(2.0 * PI / g.dx / 16.0);
    let (coarse, _) = fourier_power(g, p_conj, opts.periods, panel, opts.rel_tol);
    let (fine, tail) = fourier_power(g, p_conj, 2 * opts.periods, 0.5 * panel, opts.rel_tol);
    let coarse_norm = coarse.powf(1.0 / p_conj);
    let fourier_norm = fine.powf(1.0 / p_conj);
    let change = (fourier_norm - coarse_norm).abs() / fourier_norm;
    if change > opts.refinement_gate {
        return Err(Error::GridResolution(format!(
            "Fourier norm moved by {:.3}% under refinement",
            100.0 * change
        )));
    }
    let lorentz = lorentz_norm(&g.as_step_function()?, LorentzExponents::new(p, p_conj)?);
    Ok(HausdorffYoungReport {
        p,
        p_conj,
        fourier_norm,
        lorentz_norm: lorentz,
        ratio: fourier_norm / lorentz,
        plancherel_constant: (2.0 * PI).sqrt(),
        xi_max: 2.0 * opts.periods as f64 * 2.0 * PI / g.dx,
        tail_fraction: tail / fine,
        refinement_change: change,
    })
}

/// Check for a continuous `g` sampled on `cells` cells of `[a, b]`; rejects the
/// grid when doubling the cell count moves either norm by more than the gate.
pub fn hausdorff_young_check_fn(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cells: usize,
    p: f64,
    opts: &HausdorffYoungOptions,
) -> Result<HausdorffYoungReport> {
    let coarse = hausdorff_young_check_with(&SampledFunction::from_fn(&f, a, b, cells)?, p, opts)?;
    let fine =
        hausdorff_young_check_with(&SampledFunction::from_fn(&f, a, b, 2 * cells)?, p, opts)?;
    let moved = |x: f64, y: f64| (x - y).abs() / y;
    let worst = moved(coarse.fourier_norm, fine.fourier_norm)
        .max(moved(coarse.lorentz_norm, fine.lorentz_norm));
    if worst > opts.refinement_gate {
        return Err(Error::GridResolution(format!(
            "a norm moved by {:.3}% when the sample grid was doubled",
            100.0 * worst
        )));
    }
    Ok(HausdorffYoungReport {
        refinement_change: fine.refinement_change.max(worst),
        ..fine
    })
}

/// Cells of the corpus grid; the cell width is irrelevant since the ratio is dilation invariant.
pub const CORPUS_CELLS: usize = 32;
const CORPUS_DX: f64 = 1.0 / 8.0;

/// Largest ratio over `trials` sums of `count` random grid-aligned indicators.
pub fn hausdorff_young_corpus_max(
    rng: &mut impl Rng,
    trials: usize,
    count: usize,
    p: f64,
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let g = SampledFunction::random_indicators(rng, count, CORPUS_CELLS, CORPUS_DX)?;
        best = best.max(hausdorff_young_check(&g, p)?.ratio);
    }
    Ok(best)
}

/// Sum of the indicators of the cell ranges `lo..hi` on the corpus grid.
pub fn indicator_sum(intervals: &[(usize, usize)]) -> Result<SampledFunction> {
    let mut values = vec![0.0; CORPUS_CELLS];
    for &(lo, hi) in intervals {
        if !(lo < hi && hi <= CORPUS_CELLS) {
            return invalid(format!("cell range {lo}..{hi} is empty or leaves the grid"));
        }
        for v in &mut values[lo..hi] {
            *v += 1.0;
        }
    }
    SampledFunction::new(0.0, CORPUS_DX, values)
}

/// Random start for [`hausdorff_young_climb`].
pub fn random_intervals(rng: &mut impl Rng, count: usize) -> Vec<(usize, usize)> {
    (0..count)
        .map(|_| {
            let lo = rng.gen_range(0..CORPUS_CELLS);
            (lo, rng.gen_range(lo + 1..=CORPUS_CELLS))
        })
        .collect()
}

/// Local maximum of the ratio over sums of indicators, reached from `start` by
/// moving single endpoints one cell at a time while the ratio grows.
pub fn hausdorff_young_climb(
    start: Vec<(usize, usize)>,
    p: f64,
) -> Result<(f64, Vec<(usize, usize)>)> {
    let count = start.len();
    let mut current = start;
    let mut best = hausdorff_young_check(&indicator_sum(&current)?, p)?.ratio;
    loop {
        let mut improved = false;
        for k in 0..count {
            for (end, step) in [(0, -1), (0, 1), (1, -1), (1, 1)] {
                let (lo, hi) = current[k];
                let moved = if end == 0 {
                    lo as isize + step
                } else {
                    hi as isize + step
                };
                let candidate = if end == 0 {
                    (moved, hi as isize)
                } else {
                    (lo as isize, moved)
                };
                if candidate.0 < 0
                    || candidate.0 >= candidate.1
                    || candidate.1 > CORPUS_CELLS as isize
                {
                    continue;
                }
                let mut trial = current.clone();
                trial[k] = (candidate.0 as usize, candidate.1 as usize);
                let ratio = hausdorff_young_check(&indicator_sum(&trial)?, p)?.ratio;
                if ratio > best {
                    best = ratio;
                    current = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            return Ok((best, current));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plancherel_case() {
        let bump = |x: f64| (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
        let r =
            hausdorff_young_check_fn(bump, -8.0, 8.0, 256, 2.0, &HausdorffYoungOptions::default())
                .unwrap();
        assert!(
            (r.ratio - r.plancherel_constant).abs() < 1e-6 * r.plancherel_constant,
            "{}",
            r.ratio
        );
    }

    #[test]
    fn transform_of_unit_indicator() {
        let g = SampledFunction::new(0.0, 0.125, vec![1.0; 8]).unwrap();
        for xi in [0.0, 0.3, 5.0, -17.0] {
            let exact = if xi == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -xi))
                    / Complex64::new(0.0, xi)
            };
            assert!((g.transform(xi) - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn indicator_ratio_is_finite() {
        let g = SampledFunction::new(0.0, 1.0 / 64.0, vec![1.0; 64]).unwrap();
        let r = hausdorff_young_check(&g, 1.5).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert!((r.lorentz_norm - 1.0).abs() < 1e-14);
        // Dilation invariance: the indicator of [0,1] on any uniform grid gives the same ratio.
        let g2 = SampledFunction::new(0.0, 1.0 / 8.0, vec![1.0; 8]).unwrap();
        let r2 = hausdorff_young_check(&g2, 1.5).unwrap();
        assert!((r.ratio - r2.ratio).abs() < 1e-6 * r.ratio);
    }

    #[test]
    fn rejects_bad_input() {
        let g = SampledFunction::new(0.0, 1.0, vec![1.0]).unwrap();
        assert!(hausdorff_young_check(&g, 1.0).is_err());
        assert!(hausdorff_young_check(&g, 2.5).is_err());
        assert!(SampledFunction::new(0.0, 0.0, vec![1.0]).is_err());
    }

    #[test]
    fn coarse_sampling_is_flagged() {
        let spike = |x: f64| (-(x * 40.0).powi(2)).exp();
        let res =
            hausdorff_young_check_fn(spike, -1.0, 1.0, 8, 1.5, &HausdorffYoungOptions::default());
        assert!(matches!(res, Err(Error::GridResolution(_))));
    }
}
