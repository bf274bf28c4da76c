//! Global-norm, band and sweep-semantics checks that take seconds rather than milliseconds.

use conelab::dyadic::{Dyadic, DyadicRange};
use conelab::error::Error;
use conelab::experiments::{
    band_sharpness, dyadic_sweep, equal_mass_levels, fit_slope, global_restriction_check,
    multi_band, BandOptions, ExponentTriple, Flag, GlobalOptions, SweepOptions,
};
use conelab::extension::Term;
use conelab::profile::{ProfileShape, RadialProfile};

/// Ratio for the single band `F ≡ 1` on `[1, 2]` at `(n, p, q) = (3, 2, 4)` with the default levels.
const SINGLE_LEVEL_CONSTANT: f64 = 7.760549;

fn critical() -> ExponentTriple {
    ExponentTriple::new(3, 2.0, 4.0).unwrap()
}

fn ratio(levels: &[(Dyadic, f64)]) -> f64 {
    let pieces = multi_band(&RadialProfile::unit_constant(), levels, 3, 2.0).unwrap();
    let report = global_restriction_check(pieces, &critical(), &GlobalOptions::default()).unwrap();
    assert!(report.flags.is_empty(), "{:?}", report.flags);
    assert!(report.near_tail + report.far_tail < 0.05 * report.lhs.powi(4));
    report.ratio
}

#[test]
fn single_band_reproduces_level_constant() {
    let r = ratio(&equal_mass_levels(&[Dyadic(0)]));
    assert!(
        (r - SINGLE_LEVEL_CONSTANT).abs() <= 1e-5 * SINGLE_LEVEL_CONSTANT,
        "{r}"
    );
}

#[test]
fn single_band_constant_is_stable_in_the_level_window() {
    let pieces = vec![RadialProfile::unit_constant()];
    let opts = GlobalOptions {
        near_levels: 6,
        far_levels: 7,
        ..GlobalOptions::default()
    };
    let r = global_restriction_check(pieces, &critical(), &opts)
        .unwrap()
        .ratio;
    assert!(
        (r - SINGLE_LEVEL_CONSTANT).abs() <= 1e-4 * SINGLE_LEVEL_CONSTANT,
        "{r}"
    );
}

#[test]
fn separated_bands_are_quasi_orthogonal() {
    let r = ratio(&equal_mass_levels(&[Dyadic(0), Dyadic(3)]));
    let bound = 2f64.powf(0.75) * SINGLE_LEVEL_CONSTANT * 1.1;
    assert!(r <= bound, "{r} > {bound}");
}

#[test]
fn fast_decaying_masses_stay_near_the_level_constant() {
    let levels: Vec<(Dyadic, f64)> = (-1..=1)
        .map(|j| (Dyadic(j), 2f64.powi(-10 * j.abs())))
        .collect();
    let r = ratio(&levels);
    assert!((r / SINGLE_LEVEL_CONSTANT - 1.0).abs() <= 0.05, "{r}");
}

#[test]
fn band_exponents() {
    let deltas: Vec<Dyadic> = (-6..=0).rev().map(Dyadic).collect();
    let report = band_sharpness(&deltas, &critical(), &BandOptions::default()).unwrap();
    assert_eq!(report.points[0].flags, [Flag::ExcludedFromFit]);
    assert!(report.points[1..].iter().all(|p| p.flags.is_empty()));
    assert_eq!(report.lhs_fit.points, 6);
    assert!(
        (report.lhs_fit.slope - 0.75).abs() <= 0.1,
        "{}",
        report.lhs_fit.slope
    );
    assert!(
        (report.rhs_fit.slope - 0.5).abs() <= 1e-12,
        "{}",
        report.rhs_fit.slope
    );
    assert!(report.lhs_fit.slope >= report.rhs_fit.slope);
}

#[test]
fn short_cutoff_is_flagged() {
    let opts = BandOptions {
        cutoff_margin: 1,
        ..BandOptions::default()
    };
    let deltas: Vec<Dyadic> = (-5..=-1).rev().map(Dyadic).collect();
    let report = band_sharpness(&deltas, &critical(), &opts);
    // Every point is flagged, so nothing is left to fit.
    assert!(
        matches!(report, Err(Error::InsufficientPoints { available: 0, .. })),
        "{report:?}"
    );
}

fn slope(profile: &RadialProfile, term: Term, lo: i32, hi: i32) -> f64 {
    let points = dyadic_sweep(
        profile,
        &critical(),
        DyadicRange::new(lo, hi).unwrap(),
        term,
        &SweepOptions::default(),
    )
    .unwrap();
    fit_slope(&points).unwrap().slope
}

#[test]
fn constant_profile_main_term_is_sharp() {
    let s = slope(&RadialProfile::unit_constant(), Term::Main, 3, 8);
    assert!((s + 0.25).abs() <= 0.05, "{s}");
}

#[test]
fn smooth_profiles_respect_the_upper_bound() {
    for shape in [ProfileShape::SmoothBump, ProfileShape::Power(2.0)] {
        let f = RadialProfile::new(shape, (1.0, 2.0)).unwrap();
        for term in [Term::Full, Term::Main] {
            let s = slope(&f, term, 3, 7);
            assert!(s <= -0.25 + 0.05, "{term:?} {s}");
        }
    }
}
