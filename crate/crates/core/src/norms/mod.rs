//! Space-time `L^q` norms over dyadic annuli, Lorentz norms and the inequality checkers.

pub mod fourier;
pub mod lorentz;
pub mod weighted_bessel;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{
    adaptive_time_truncation_with, try_integrate, AdaptiveOptions, TruncationRequest,
};
use crate::special::sphere_area;

pub use fourier::{
    hausdorff_young_check, HausdorffYoungOptions, HausdorffYoungReport, SampledFunction,
};
pub use lorentz::{
    holder_lorentz_check, lorentz_norm, HolderReport, LorentzExponents, StepFunction,
};
pub use weighted_bessel::{weighted_bessel_norm, WeightedBesselOptions, WeightedBesselResult};

/// A time trace `t ↦ u(t, r)` at a fixed radius.
pub type Trace<'a> = Box<dyn Fn(f64) -> Complex64 + 'a>;

/// Where a field lives in time at a given radius.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeLayout {
    /// Points the trace concentrates around, decaying like `|t - c|^{-1}` away from them.
    pub centers: Vec<f64>,
    /// Exact compact support in `t`, if known.
    pub support: Option<(f64, f64)>,
    pub initial_half_width: f64,
    /// Spread of frequencies in the trace; `|u|^q` oscillates no faster than `q` times this.
    pub bandwidth: f64,
}

/// A radial space-time function `u(t, |x|)` on `ℝ × ℝⁿ`.
pub trait SpacetimeField {
    fn dimension(&self) -> usize;

    fn time_layout(&self, r: f64) -> TimeLayout;

    /// Trace at radius `r`, accurate for `|t| <= t_bound`.
    fn trace(&self, r: f64, t_bound: f64) -> Result<Trace<'_>>;
}

/// A field given by a plain closure `(t, r) ↦ u`.
pub struct FnField<F> {
    n: usize,
    layout: TimeLayout,
    f: F,
}

impl<F: Fn(f64, f64) -> Complex64> FnField<F> {
    /// Field supported in `t ∈ [lo, hi]` at every radius.
    pub fn compact(n: usize, support: (f64, f64), f: F) -> Self {
        Self {
            n,
            layout: TimeLayout {
                centers: vec![0.5 * (support.0 + support.1)],
                support: Some(support),
                initial_half_width: 0.5 * (support.1 - support.0),
                bandwidth: 1.0,
            },
            f,
        }
    }

    /// Field decaying like `|t - c|^{-1}` around the given centres.
    pub fn decaying(n: usize, centers: Vec<f64>, bandwidth: f64, f: F) -> Self {
        Self {
            n,
            layout: TimeLayout {
                centers,
                support: None,
                initial_half_width: 8.0,
                bandwidth,
            },
            f,
        }
    }
}

impl<F: Fn(f64, f64) -> Complex64> SpacetimeField for FnField<F> {
    fn dimension(&self) -> usize {
        self.n
    }

    fn time_layout(&self, _r: f64) -> TimeLayout {
        self.layout.clone()
    }

    fn trace(&self, r: f64, _t_bound: f64) -> Result<Trace<'_>> {
        Ok(Box::new(move |t| (self.f)(t, r)))
    }
}

/// `A_R = {R/2 <= |x| <= R}` in `ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusRegion {
    pub r: Dyadic,
    pub n: usize,
}

impl AnnulusRegion {
    pub fn new(r: Dyadic, n: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!("dimension {n} must be at least 2"));
        }
        Ok(Self { r, n })
    }

    pub fn radii(&self) -> (f64, f64) {
        let big = self.r.value();
        (0.5 * big, big)
    }
}

/// How the time windows were chosen, aggregated over the sampled radii.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub radii: usize,
    pub max_half_width: f64,
    pub max_doublings: u32,
    /// Largest `tail_bound / mass` over the radii.
    pub max_tail_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub abs_error: f64,
    pub truncation: TruncationReport,
}

impl NormResult {
    fn zero() -> Self {
        Self {
            value: 0.0,
            abs_error: 0.0,
            truncation: TruncationReport::default(),
        }
    }
}

/// Accuracy knobs for the space-time norms.
#[derive(Debug, Clone, PartialEq)]
pub struct NormOptions {
    /// Admissible omitted-to-captured time mass.
    pub truncation_tol: f64,
    pub radial_order: usize,
    pub radial_rel_tol: f64,
    pub radial_max_depth: u32,
    /// Panels in `r` per dyadic shell before refinement.
    pub radial_panels: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            truncation_tol: 1e-3,
            radial_order: 6,
            radial_rel_tol: 1e-3,
            radial_max_depth: 5,
            radial_panels: 2,
        }
    }
}

/// `∫_ℝ |u(t, r)|^q dt` with its error and the chosen windows.
pub fn time_mass(
    u: &(impl SpacetimeField + ?Sized),
    q: f64,
    r: f64,
    tol: f64,
) -> Result<(f64, f64, f64, f64, u32)> {
    let layout = u.time_layout(r);
    let mut req = TruncationRequest::new(q, layout.centers.clone(), tol);
    req.support = layout.support;
    req.initial_half_width = layout.initial_half_width;
    req.max_panel = 4.0 * std::f64::consts::PI / (q.max(1.0) * layout.bandwidth.max(1e-300));
    if let Some((lo, hi)) = layout.support {
        req.max_panel = req.max_panel.min(hi - lo);
    }
    let out = adaptive_time_truncation_with(|t_bound| u.trace(r, t_bound), &req)?;
    Ok((
        out.mass,
        out.mass_error,
        out.tail_bound,
        out.half_width,
        out.doublings,
    ))
}

/// `(|S^{n-1}| ∫_{r_lo}^{r_hi} ∫_ℝ |u(t, r)|^q dt r^{n-1} dr)^{1/q}`.
pub fn lq_shell_norm(
    u: &(impl SpacetimeField + ?Sized),
    q: f64,
    r_lo: f64,
    r_hi: f64,
    opts: &NormOptions,
) -> Result<NormResult> {
    if !(q >= 1.0 && q.is_finite()) {
        return invalid(format!("space-time norm needs finite q >= 1, got {q}"));
    }
    if !(r_lo >= 0.0 && r_hi > r_lo && r_hi.is_finite()) {
        return invalid(format!("bad radial shell [{r_lo}, {r_hi}]"));
    }
    let n = u.dimension();
    let mut report = TruncationReport::default();
    let mut worst_rel: f64 = 0.0;
    let radial = AdaptiveOptions {
        order: opts.radial_order,
        max_panel: (r_hi - r_lo) / opts.radial_panels.max(1) as f64,
        rel_tol: opts.radial_rel_tol,
        max_depth: opts.radial_max_depth,
        ..AdaptiveOptions::default()
    };
    let res = try_integrate(
        |r| {
            let (mass, mass_err, tail, half_width, doublings) =
                time_mass(u, q, r, opts.truncation_tol)?;
            report.radii += 1;
            report.max_half_width = report.max_half_width.max(half_width);
            report.max_doublings = report.max_doublings.max(doublings);
            if mass > 0.0 {
                report.max_tail_ratio = report.max_tail_ratio.max(tail / mass);
                worst_rel = worst_rel.max((mass_err + tail) / mass);
            }
            Ok(mass * r.powi(n as i32 - 1))
        },
        r_lo,
        r_hi,
        &radial,
    )?;
    let area = sphere_area(n);
    let integral = area * res.value;
    if integral <= 0.0 {
        let mut out = NormResult::zero();
        out.truncation = report;
        out.abs_error = (area * res.abs_error).powf(1.0 / q);
        return Ok(out);
    }
    let integral_err = area * res.abs_error + worst_rel * integral;
    let value = integral.powf(1.0 / q);
    Ok(NormResult {
        value,
        abs_error: value * integral_err / (q * integral),
        truncation: report,
    })
}

/// `‖u‖_{L^q(ℝ × A_R)}`.
pub fn lq_annulus_norm(
    u: &(impl SpacetimeField + ?Sized),
    q: f64,
    region: AnnulusRegion,
) -> Result<NormResult> {
    lq_annulus_norm_with(u, q, region, &NormOptions::default())
}

pub fn lq_annulus_norm_with(
    u: &(impl SpacetimeField + ?Sized),
    q: f64,
    region: AnnulusRegion,
    opts: &NormOptions,
) -> Result<NormResult> {
    if u.dimension() != region.n {
        return Err(Error::InvalidArgument(format!(
            "field lives in dimension {}, region in {}",
            u.dimension(),
            region.n
        )));
    }
    let (lo, hi) = region.radii();
    lq_shell_norm(u, q, lo, hi, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{ExtensionField, Term};
    use crate::profile::RadialProfile;
    use std::f64::consts::PI;

    fn window(t: f64, _r: f64) -> Complex64 {
        if (0.0..=1.0).contains(&t) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    #[test]
    fn constant_block_has_closed_form() {
        let u = FnField::compact(3, (0.0, 1.0), window);
        let region = AnnulusRegion::new(Dyadic(1), 3).unwrap();
        let got = lq_annulus_norm(&u, 4.0, region).unwrap();
        let want = (4.0 * PI * 7.0 / 3.0).powf(0.25);
        assert!(
            (got.value - want).abs() < 1e-10 * want,
            "{} vs {want}",
            got.value
        );
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let u = FnField::compact(3, (-1.0, 1.0), |_, _| Complex64::new(0.0, 0.0));
        let got = lq_annulus_norm(&u, 4.0, AnnulusRegion::new(Dyadic(3), 3).unwrap()).unwrap();
        assert_eq!(got.value, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let u = FnField::compact(2, (0.0, 1.0), window);
        assert!(lq_annulus_norm(&u, 2.0, AnnulusRegion::new(Dyadic(0), 3).unwrap()).is_err());
        assert!(lq_annulus_norm(&u, 0.5, AnnulusRegion::new(Dyadic(0), 2).unwrap()).is_err());
    }

    #[test]
    fn shells_are_additive() {
        let u = FnField::decaying(2, vec![0.0], 1.0, |t, r| {
            Complex64::new(1.0 / (1.0 + t * t + r), 0.0)
        });
        let q = 3.0;
        let opts = NormOptions {
            radial_rel_tol: 1e-10,
            truncation_tol: 1e-6,
            radial_max_depth: 12,
            ..NormOptions::default()
        };
        let whole = lq_shell_norm(&u, q, 0.5, 4.0, &opts).unwrap().value.powf(q);
        let parts: f64 = (0..3)
            .map(|k| {
                let region = AnnulusRegion::new(Dyadic(k), 2).unwrap();
                lq_annulus_norm_with(&u, q, region, &opts)
                    .unwrap()
                    .value
                    .powf(q)
            })
            .sum();
        assert!((whole - parts).abs() < 1e-6 * whole, "{whole} vs {parts}");
    }

    #[test]
    fn extension_annulus_norm_decays_at_far_field_rate() {
        let field = ExtensionField::new(RadialProfile::unit_constant(), 3, Term::Full).unwrap();
        let a = lq_annulus_norm(&field, 4.0, AnnulusRegion::new(Dyadic(6), 3).unwrap()).unwrap();
        let b = lq_annulus_norm(&field, 4.0, AnnulusRegion::new(Dyadic(7), 3).unwrap()).unwrap();
        let ratio = b.value / a.value;
        assert!(
            (ratio - 2f64.powf(-0.25)).abs() < 0.03 * 2f64.powf(-0.25),
            "ratio {ratio}"
        );
        assert!(a.abs_error <= 1e-3 * a.value);
    }
}
