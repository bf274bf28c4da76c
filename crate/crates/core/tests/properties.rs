//! Property tests for the invariants shared across modules.

use conelab::bessel::{
    bessel_j, bessel_j_series, bessel_j_split, bessel_main_term, scaled_bessel_j, BesselOrder,
};
use conelab::dyadic::Dyadic;
use conelab::experiments::{feasibility_classify, ExponentTriple};
use conelab::extension::{evaluate, extension_direct, polar_constant, SpacetimePoint, Term};
use conelab::norms::{lorentz_norm, LorentzExponents, StepFunction};
use conelab::profile::{ProfileShape, RadialProfile};
use conelab::quadrature::gauss_legendre;
use proptest::prelude::*;
use std::f64::consts::PI;

fn pieces() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.01f64..5.0, 0.0f64..3.0), 1..12)
}

fn exponents() -> impl Strategy<Value = LorentzExponents> {
    (1.0f64..6.0, 1.0f64..8.0).prop_map(|(p, q)| LorentzExponents::new(p, q).unwrap())
}

fn profiles() -> impl Strategy<Value = RadialProfile> {
    prop_oneof![
        Just(RadialProfile::unit_constant()),
        Just(RadialProfile::new(ProfileShape::SmoothBump, (1.0, 2.0)).unwrap()),
        (-2.0f64..3.0)
            .prop_map(|k| RadialProfile::new(ProfileShape::Power(k), (1.0, 2.0)).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lorentz_norm_ignores_piece_order(p in pieces(), e in exponents(), shift in 0usize..12) {
        let f = StepFunction::new(p.clone()).unwrap();
        let mut shuffled = p;
        shuffled.reverse();
        let k = shift % shuffled.len();
        shuffled.rotate_left(k);
        let g = StepFunction::new(shuffled).unwrap();
        let (a, b) = (lorentz_norm(&f, e), lorentz_norm(&g, e));
        prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
    }

    #[test]
    fn diagonal_lorentz_norm_is_lp(p in pieces(), e in 1.0f64..6.0) {
        let f = StepFunction::new(p).unwrap();
        let lp = f.lp_norm(e);
        let lorentz = lorentz_norm(&f, LorentzExponents::new(e, e).unwrap());
        prop_assert!((lorentz - lp).abs() <= 1e-12 * lp.max(1e-300));
    }

    #[test]
    fn dilation_scales_by_root_of_lambda(p in pieces(), e in exponents(), k in -8i32..8) {
        let f = StepFunction::new(p).unwrap();
        let lambda = Dyadic(k).value();
        let base = lorentz_norm(&f, e);
        let dilated = lorentz_norm(&f.dilated(lambda).unwrap(), e);
        prop_assert!((dilated - lambda.powf(1.0 / e.p) * base).abs() <= 1e-13 * dilated.max(1e-300));
    }

    #[test]
    fn weak_norm_dilation(p in pieces(), e in 1.0f64..6.0, k in -8i32..8) {
        let f = StepFunction::new(p).unwrap();
        let weak = LorentzExponents::weak(e).unwrap();
        let lambda = Dyadic(k).value();
        let want = lambda.powf(1.0 / e) * lorentz_norm(&f, weak);
        prop_assert!((lorentz_norm(&f.dilated(lambda).unwrap(), weak) - want).abs() <= 1e-13 * want.max(1e-300));
    }

    #[test]
    fn pointwise_domination_is_monotone(p in pieces(), shrink in prop::collection::vec(0.0f64..=1.0, 12), e in exponents()) {
        let f = StepFunction::new(p.clone()).unwrap();
        let g = StepFunction::new(p.iter().zip(&shrink).map(|(&(m, v), s)| (m, v * s)).collect()).unwrap();
        prop_assert!(lorentz_norm(&g, e) <= lorentz_norm(&f, e) * (1.0 + 1e-12));
    }

    #[test]
    fn gauss_rules_integrate_polynomials_exactly(
        order in 2usize..20,
        coeffs in prop::collection::vec(-1.0f64..1.0, 40),
        a in -2.0f64..2.0,
        width in 0.1f64..3.0,
    ) {
        let degree = 2 * order - 1;
        let c = &coeffs[..=degree.min(coeffs.len() - 1)];
        let b = a + width;
        let poly = |x: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck);
        let anti = |x: f64| c.iter().enumerate().rev().fold(0.0, |acc, (k, &ck)| acc * x + ck / (k + 1) as f64) * x;
        let (value, _) = gauss_legendre(order).apply(&mut |x| Ok(poly(x)), a, b).unwrap();
        let exact = anti(b) - anti(a);
        let scale: f64 = c.iter().map(|x| x.abs()).sum::<f64>() * width * (a.abs() + width).max(1.0).powi(degree as i32);
        prop_assert!((value - exact).abs() <= 1e-13 * scale, "{value} vs {exact}");
    }

    #[test]
    fn bessel_paths_agree(k in 0usize..5, r in 5.0f64..50.0) {
        let order = BesselOrder::new(k as f64 / 2.0).unwrap();
        let series = bessel_j_series(order, r).unwrap();
        let split = bessel_j_split(order, r).unwrap();
        prop_assert_eq!(series.value.im, 0.0);
        prop_assert!(series.abs_error >= 0.0 && split.abs_error >= 0.0);
        let envelope = (2.0 / (PI * r)).sqrt();
        prop_assert!((series.value.re - split.value.re).abs() <= 1e-8 * envelope);
    }

    #[test]
    fn half_order_main_term_is_the_whole_function(r in 1.0f64..1e3) {
        let half = BesselOrder::new(0.5).unwrap();
        prop_assert_eq!(bessel_main_term(half, r).unwrap().re, bessel_j(half, r).unwrap().value.re);
    }

    #[test]
    fn extension_is_conjugate_symmetric_in_time(f in profiles(), n in 2usize..=5, t in -40.0f64..40.0, r in 0.0f64..40.0) {
        let a = extension_direct(&f, SpacetimePoint::new(t, r, n).unwrap()).unwrap().value;
        let b = extension_direct(&f, SpacetimePoint::new(-t, r, n).unwrap()).unwrap().value;
        prop_assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn main_and_error_terms_add_up(f in profiles(), n in 2usize..=5, t in -60.0f64..60.0, r in 1.0f64..80.0) {
        let pt = SpacetimePoint::new(t, r, n).unwrap();
        let direct = evaluate(&f, pt, Term::Full).unwrap().value;
        let split = evaluate(&f, pt, Term::Main).unwrap().value + evaluate(&f, pt, Term::Error).unwrap().value;
        prop_assert!((direct - split).norm() <= 1e-7 * (1.0 + direct.norm()));
    }

    #[test]
    fn extension_is_bounded_by_profile_mass(f in profiles(), n in 2usize..=5, t in -40.0f64..40.0, r in 0.0f64..40.0) {
        let order = BesselOrder::for_dimension(n).unwrap();
        let bound = polar_constant(n) * scaled_bessel_j(order, 0.0) * f.weighted_power_integral(1.0, n as f64 - 2.0);
        let value = extension_direct(&f, SpacetimePoint::new(t, r, n).unwrap()).unwrap().value;
        prop_assert!(value.norm() <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn critical_line_triples_are_feasible(n in 2usize..=8, excess in 1e-3f64..20.0) {
        let nf = n as f64;
        let q = 2.0 * nf / (nf - 1.0) + excess;
        let p_conj = q * (nf - 1.0) / (nf + 1.0);
        let p = p_conj / (p_conj - 1.0);
        let f = feasibility_classify(&ExponentTriple::new(n, p, q).unwrap());
        prop_assert!(f.scaling_critical_line);
        prop_assert!(f.conjecture_region);
    }

    #[test]
    fn critical_line_implies_conjecture(n in 2usize..=8, p in 1.0f64..10.0, q in 1.0f64..20.0) {
        let exps = ExponentTriple::new(n, p, q).unwrap();
        let f = feasibility_classify(&exps);
        if f.scaling_critical_line && exps.above_critical() {
            prop_assert!(f.conjecture_region);
        }
        if f.conjecture_region {
            prop_assert!(exps.above_critical());
        }
    }

    #[test]
    fn dyadic_values_round_trip(k in -300i32..300) {
        let d = Dyadic(k);
        prop_assert_eq!(Dyadic::from_value(d.value()).unwrap(), d);
        prop_assert!(Dyadic::from_value(d.value() * 1.5).is_err());
    }
}
