//! Per-annulus norm sweeps and log-log slope fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExponentTriple, Flag};
use crate::dyadic::{Dyadic, DyadicRange};
use crate::error::{invalid, Error, Result};
use crate::extension::{ExtensionField, Term};
use crate::norms::{lq_annulus_norm_with, AnnulusRegion, NormOptions, NormResult, SpacetimeField};
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOptions {
    pub norm: NormOptions,
}

/// One annulus of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub r: Dyadic,
    /// `None` when the annulus failed; the failure is in `message`.
    pub norm: Option<NormResult>,
    pub flags: Vec<Flag>,
    pub message: Option<String>,
}

impl SweepPoint {
    pub fn usable(&self) -> bool {
        self.flags.is_empty()
            && self
                .norm
                .as_ref()
                .is_some_and(|n| n.value > 0.0 && n.value.is_finite())
    }
}

/// Annulus norms of the chosen term of the extension of `profile`.
///
/// Annuli whose time truncation does not settle are flagged rather than aborting the sweep.
pub fn dyadic_sweep(
    profile: &RadialProfile,
    exps: &ExponentTriple,
    range: DyadicRange,
    term: Term,
    opts: &SweepOptions,
) -> Result<Vec<SweepPoint>> {
    if term != Term::Full && range.lo < 1 {
        return invalid(format!(
            "the {term} term is only swept for R >= 2, range starts at 2^{}",
            range.lo
        ));
    }
    let field = ExtensionField::new(profile.clone(), exps.n, term)?;
    sweep_field(&field, exps, range, opts)
}

pub(crate) fn sweep_field(
    field: &(impl SpacetimeField + Sync),
    exps: &ExponentTriple,
    range: DyadicRange,
    opts: &SweepOptions,
) -> Result<Vec<SweepPoint>> {
    let radii: Vec<Dyadic> = range.iter().collect();
    radii
        .par_iter()
        .map(|&r| {
            let region = AnnulusRegion::new(r, exps.n)?;
            match lq_annulus_norm_with(field, exps.q, region, &opts.norm) {
                Ok(norm) => Ok(SweepPoint {
                    r,
                    norm: Some(norm),
                    flags: Vec::new(),
                    message: None,
                }),
                Err(
                    e @ (Error::TruncationNonConvergence(_) | Error::QuadratureNonConvergence(_)),
                ) => Ok(SweepPoint {
                    r,
                    norm: None,
                    flags: vec![Flag::TruncationUnstable],
                    message: Some(e.to_string()),
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// `Σ ‖u‖^q` over the usable annuli.
pub fn sweep_norm_power(points: &[SweepPoint], q: f64) -> f64 {
    points
        .iter()
        .filter_map(|p| p.norm.as_ref())
        .map(|n| n.value.powf(q))
        .sum()
}

/// Least-squares line through `(log2 R, log2 norm)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual, in log2 units.
    pub max_residual: f64,
    pub std_error: f64,
    /// First and last annulus used.
    pub window: (Dyadic, Dyadic),
    pub points: usize,
}

impl SlopeFit {
    /// Refits on any sub-window of at least four consecutive points move the slope by less than this.
    pub fn confidence_width(&self) -> f64 {
        2.0 * self.std_error + self.max_residual + 1e-12
    }
}

pub(crate) const MIN_FIT_POINTS: usize = 4;

/// Fits the usable points; flagged or vanishing annuli are skipped.
pub fn fit_slope(points: &[SweepPoint]) -> Result<SlopeFit> {
    let data: Vec<(i32, f64)> = points
        .iter()
        .filter(|p| p.usable())
        .map(|p| (p.r.exponent(), p.norm.as_ref().unwrap().value))
        .collect();
    fit_log2(&data)
}

pub(crate) fn fit_log2(data: &[(i32, f64)]) -> Result<SlopeFit> {
    if data.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            available: data.len(),
        });
    }
    let k = data.len() as f64;
    let xs: Vec<f64> = data.iter().map(|d| d.0 as f64).collect();
    let ys: Vec<f64> = data.iter().map(|d| d.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("fit needs at least two distinct abscissae");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - intercept - slope * x)
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let std_error = (ssr / (k - 2.0) / sxx).sqrt();
    let lo = data.iter().map(|d| d.0).min().unwrap();
    let hi = data.iter().map(|d| d.0).max().unwrap();
    Ok(SlopeFit {
        slope,
        intercept,
        max_residual,
        std_error,
        window: (Dyadic(lo), Dyadic(hi)),
        points: data.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(exps: &[i32], f: impl Fn(f64) -> f64) -> Vec<SweepPoint> {
        exps.iter()
            .map(|&e| SweepPoint {
                r: Dyadic(e),
                norm: Some(NormResult {
                    value: f(Dyadic(e).value()),
                    abs_error: 0.0,
                    truncation: Default::default(),
                }),
                flags: Vec::new(),
                message: None,
            })
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let pts = synthetic(&[3, 4, 5, 6, 7, 8], |r| 5.0 * r.powf(-0.25));
        let fit = fit_slope(&pts).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-14);
        assert!(fit.max_residual < 1e-14);
        assert!((fit.intercept - 5f64.log2()).abs() < 1e-13);
        assert_eq!(fit.window, (Dyadic(3), Dyadic(8)));
    }

    #[test]
    fn flagged_points_are_excluded() {
        let mut pts = synthetic(&[1, 2, 3, 4, 5], |r| r.powf(0.75));
        pts[4].norm.as_mut().unwrap().value = 1e9;
        pts[4].flags.push(Flag::TruncationUnstable);
        let fit = fit_slope(&pts).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-14);
        pts[3].flags.push(Flag::ExcludedFromFit);
        assert!(matches!(
            fit_slope(&pts),
            Err(Error::InsufficientPoints {
                needed: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn main_term_needs_far_field() {
        let t = ExponentTriple::new(3, 2.0, 4.0).unwrap();
        let r = DyadicRange::new(0, 3).unwrap();
        let opts = SweepOptions::default();
        assert!(dyadic_sweep(&RadialProfile::unit_constant(), &t, r, Term::Main, &opts).is_err());
    }

    #[test]
    fn three_dimensional_error_term_vanishes() {
        let t = ExponentTriple::new(3, 2.0, 4.0).unwrap();
        let r = DyadicRange::new(1, 4).unwrap();
        let pts = dyadic_sweep(
            &RadialProfile::unit_constant(),
            &t,
            r,
            Term::Error,
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p.norm.as_ref().unwrap().value == 0.0));
    }

    proptest! {
        #[test]
        fn subwindow_refits_stay_within_confidence(
            slope in -2.0f64..2.0,
            noise in proptest::collection::vec(-0.05f64..0.05, 8),
            start in 0usize..5,
        ) {
            let exps: Vec<i32> = (0..8).collect();
            let pts = synthetic(&exps, |r| r.powf(slope));
            let pts: Vec<SweepPoint> = pts.into_iter().zip(&noise).map(|(mut p, e)| {
                p.norm.as_mut().unwrap().value *= e.exp2();
                p
            }).collect();
            let full = fit_slope(&pts).unwrap();
            let sub = fit_slope(&pts[start..start + 4]).unwrap();
            prop_assert!((sub.slope - full.slope).abs() < full.confidence_width());
        }
    }
}
