//! Global space-time norms assembled from annuli: multi-band profiles and thin bands.

use serde::{Deserialize, Serialize};

use super::sweep::{fit_log2, sweep_field, sweep_norm_power, SlopeFit, SweepOptions, SweepPoint};
use super::{feasibility_classify, ExponentTriple, Flag};
use crate::dyadic::{Dyadic, DyadicRange};
use crate::error::{invalid, Result};
use crate::extension::{ExtensionField, Term};
use crate::profile::RadialProfile;

/// Pieces `F(·/M)` of a level-one profile, each scaled to the requested `L^p(dσ)` mass.
pub fn multi_band(
    base: &RadialProfile,
    levels: &[(Dyadic, f64)],
    n: usize,
    p: f64,
) -> Result<Vec<RadialProfile>> {
    let mut seen: Vec<Dyadic> = levels.iter().map(|l| l.0).collect();
    seen.sort();
    seen.dedup();
    if seen.len() != levels.len() {
        return invalid("dyadic levels of a multi-band profile must be distinct");
    }
    levels
        .iter()
        .map(|&(m, mass)| {
            if !(mass > 0.0 && mass.is_finite()) {
                return invalid(format!("band mass {mass} must be positive"));
            }
            let piece = base.rescaled(m)?;
            let norm = piece.cone_lp_norm(n, p);
            Ok(piece.with_amplitude(base.amplitude() * mass / norm))
        })
        .collect()
}

pub fn equal_mass_levels(levels: &[Dyadic]) -> Vec<(Dyadic, f64)> {
    levels.iter().map(|&m| (m, 1.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOptions {
    /// Annuli below the finest piece's scale, in dyadic steps.
    pub near_levels: i32,
    /// Annuli above the coarsest piece's scale.
    pub far_levels: i32,
    pub sweep: SweepOptions,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        Self {
            near_levels: 5,
            far_levels: 5,
            sweep: SweepOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalReport {
    /// `‖(f dσ)^∨‖_{L^q(ℝ^{1+n})}` including the extrapolated tails.
    pub lhs: f64,
    /// `‖f‖_{L^p(dσ)}`.
    pub rhs: f64,
    pub ratio: f64,
    pub annuli: Vec<SweepPoint>,
    /// Geometric extrapolations of `Σ ‖u‖^q` below and above the computed annuli.
    pub near_tail: f64,
    pub far_tail: f64,
    pub flags: Vec<Flag>,
}

/// Sum of `a·ρ + a·ρ² + …` with `ρ` measured from the two outermost annuli.
fn geometric_tail(outer: f64, inner: f64) -> Option<f64> {
    if inner <= 0.0 {
        return Some(0.0);
    }
    let rho = outer / inner;
    (rho < 1.0).then(|| outer * rho / (1.0 - rho))
}

/// Ratio `‖(f dσ)^∨‖_{L^q} / ‖f‖_{L^p(dσ)}` for a sum of dyadic pieces.
pub fn global_restriction_check(
    pieces: Vec<RadialProfile>,
    exps: &ExponentTriple,
    opts: &GlobalOptions,
) -> Result<GlobalReport> {
    if !feasibility_classify(exps).scaling_critical_line {
        return invalid(format!(
            "(n, p, q) = ({}, {}, {}) is off the scaling-critical line",
            exps.n, exps.p, exps.q
        ));
    }
    if !exps.above_critical() {
        return invalid(format!("q = {} must exceed 2n/(n-1)", exps.q));
    }
    if pieces.is_empty() {
        return invalid("no bands supplied");
    }
    let finest = pieces.iter().map(|p| p.dyadic_level().0).max().unwrap();
    let coarsest = pieces.iter().map(|p| p.dyadic_level().0).min().unwrap();
    let rhs = pieces
        .iter()
        .map(|p| p.cone_lp_norm(exps.n, exps.p).powf(exps.p))
        .sum::<f64>()
        .powf(1.0 / exps.p);
    let range = DyadicRange::new(-opts.near_levels - finest, opts.far_levels - coarsest)?;
    let field = ExtensionField::multi(pieces, exps.n, Term::Full)?;
    let annuli = sweep_field(&field, exps, range, &opts.sweep)?;

    let mut flags = Vec::new();
    if annuli.iter().any(|a| a.norm.is_none()) {
        flags.push(Flag::TruncationUnstable);
    }
    let power = |k: usize| {
        annuli[k]
            .norm
            .as_ref()
            .map_or(0.0, |n| n.value.powf(exps.q))
    };
    let last = annuli.len() - 1;
    let near_tail = geometric_tail(power(0), power(1));
    let far_tail = geometric_tail(power(last), power(last - 1));
    if near_tail.is_none() || far_tail.is_none() {
        flags.push(Flag::TruncationUnstable);
    }
    let near_tail = near_tail.unwrap_or(0.0);
    let far_tail = far_tail.unwrap_or(0.0);
    let lhs = (sweep_norm_power(&annuli, exps.q) + near_tail + far_tail).powf(1.0 / exps.q);
    flags.sort();
    flags.dedup();
    Ok(GlobalReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
        annuli,
        near_tail,
        far_tail,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandOptions {
    /// `j_max(δ) = log2(1/δ) + cutoff_margin`.
    pub cutoff_margin: i32,
    pub sweep: SweepOptions,
}

/// Margin below which the last annulus sits inside the `|t + r| <= 8/δ` window.
const SAFE_MARGIN: i32 = 3;

impl Default for BandOptions {
    fn default() -> Self {
        Self {
            cutoff_margin: SAFE_MARGIN,
            sweep: SweepOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub delta: Dyadic,
    pub j_max: i32,
    /// `‖(f dσ)^∨‖_{L^q}` over the annuli `R ∈ 2^{0..j_max}`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `‖F‖_{L^p(ds)} = δ^{1/p}`.
    pub rhs: f64,
    pub annuli: Vec<SweepPoint>,
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub points: Vec<BandPoint>,
    pub lhs_fit: SlopeFit,
    pub rhs_fit: SlopeFit,
}

/// Band indicators `1_{[1, 1+δ]}` and the `δ`-exponents of both sides.
pub fn band_sharpness(
    deltas: &[Dyadic],
    exps: &ExponentTriple,
    opts: &BandOptions,
) -> Result<BandReport> {
    if !exps.above_critical() {
        return invalid(format!("q = {} must exceed 2n/(n-1)", exps.q));
    }
    let mut points = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if delta.0 > 0 {
            return invalid(format!("band width {delta} exceeds 1"));
        }
        let j_max = -delta.0 + opts.cutoff_margin;
        let mut flags = Vec::new();
        if opts.cutoff_margin < SAFE_MARGIN {
            flags.push(Flag::TruncationUnstable);
        }
        if delta == Dyadic::ONE {
            flags.push(Flag::ExcludedFromFit);
        }
        let profile = RadialProfile::band_indicator(delta.value())?;
        let rhs = profile.radial_lp_norm(exps.p);
        let field = ExtensionField::new(profile, exps.n, Term::Full)?;
        let annuli = sweep_field(
            &field,
            exps,
            DyadicRange::new(0, j_max.max(0))?,
            &opts.sweep,
        )?;
        if annuli.iter().any(|a| a.norm.is_none()) {
            flags.push(Flag::TruncationUnstable);
        }
        let power = sweep_norm_power(&annuli, exps.q);
        let err_power: f64 = annuli
            .iter()
            .filter_map(|a| a.norm.as_ref())
            .map(|n| exps.q * n.value.powf(exps.q - 1.0) * n.abs_error)
            .sum();
        let lhs = power.powf(1.0 / exps.q);
        flags.sort();
        flags.dedup();
        points.push(BandPoint {
            delta,
            j_max,
            lhs,
            lhs_error: lhs * err_power / (exps.q * power),
            rhs,
            annuli,
            flags,
        });
    }
    let usable: Vec<&BandPoint> = points.iter().filter(|p| p.flags.is_empty()).collect();
    let lhs_fit = fit_log2(
        &usable
            .iter()
            .map(|p| (p.delta.0, p.lhs))
            .collect::<Vec<_>>(),
    )?;
    let rhs_fit = fit_log2(
        &usable
            .iter()
            .map(|p| (p.delta.0, p.rhs))
            .collect::<Vec<_>>(),
    )?;
    Ok(BandReport {
        points,
        lhs_fit,
        rhs_fit,
    })
}
