//! The cone extension operator for cylindrically symmetric data.
//!
//! For `f(|ξ|, ξ) = F(|ξ|)` the extension reduces to
//! `u(t, r) = c_n ∫ F(s) s^{n-2} K(rs) e^{its} ds` with `c_n = (2π)^{n/2}` and
//! `K(ρ) = ρ^{-m} J_m(ρ)`, `m = (n-2)/2`. Replacing `J_m` by its main or error part
//! gives the main and error terms, which add up to the full extension.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{self, BesselOrder, ErrorKernelSign};
use crate::dyadic::Dyadic;
use crate::error::{invalid, Error, Result};
use crate::norms::{SpacetimeField, TimeLayout, Trace};
use crate::profile::RadialProfile;
use crate::quadrature::{
    gauss_legendre, integrate_oscillatory, quarter_period, try_integrate, AdaptiveOptions,
    OscillationSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub r: f64,
    pub n: usize,
}

impl SpacetimePoint {
    pub fn new(t: f64, r: f64, n: usize) -> Result<Self> {
        if !(t.is_finite() && r.is_finite()) {
            return invalid(format!("point ({t}, {r}) is not finite"));
        }
        if r < 0.0 {
            return invalid(format!("radius {r} is negative"));
        }
        if n < 2 {
            return invalid(format!("dimension {n} must be at least 2"));
        }
        Ok(Self { t, r, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionValue {
    pub value: Complex64,
    pub abs_error: f64,
}

/// Which part of the extension to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Full,
    Main,
    Error,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Term::Full => "full",
            Term::Main => "main",
            Term::Error => "error",
        })
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Term::Full),
            "main" => Ok(Term::Main),
            "error" => Ok(Term::Error),
            other => invalid(format!(
                "unknown term '{other}' (expected full, main or error)"
            )),
        }
    }
}

/// `(2π)^{n/2}`.
pub fn polar_constant(n: usize) -> f64 {
    (2.0 * PI).powf(n as f64 / 2.0)
}

/// Radial kernel `ρ ↦ ρ^{-m} J_m(ρ)` or one of its two parts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialKernel {
    order: BesselOrder,
    term: Term,
    main_shift: f64,
    error_scale: f64,
}

impl RadialKernel {
    pub(crate) fn new(n: usize, term: Term) -> Result<Self> {
        let order = BesselOrder::for_dimension(n)?;
        Ok(Self {
            order,
            term,
            main_shift: PI * order.kernel_exponent() / 2.0,
            error_scale: -2.0 * bessel::error_term_constant(order),
        })
    }

    pub(crate) fn eval(&self, rho: f64) -> f64 {
        let m = self.order.m();
        match self.term {
            Term::Full => bessel::scaled_bessel_j(self.order, rho),
            Term::Main => {
                let s = if self.main_shift == 0.0 {
                    rho.sin()
                } else {
                    (rho - self.main_shift).sin()
                };
                (2.0 / (PI * rho)).sqrt() * s / rho.powf(m)
            }
            Term::Error => {
                if self.order.kernel_exponent() == 0.0 {
                    return 0.0;
                }
                let (e, _) =
                    bessel::kernel_fast(self.order.kernel_exponent(), rho, ErrorKernelSign::Plus);
                self.error_scale * (Complex64::from_polar(1.0, -rho) * e).im
            }
        }
    }
}

fn radial_integral(
    profile: &RadialProfile,
    pt: &SpacetimePoint,
    kernel: RadialKernel,
) -> Result<ExtensionValue> {
    let (a, b) = profile.support();
    let n = pt.n;
    let opts = AdaptiveOptions {
        max_panel: quarter_period(pt.t.abs() + pt.r).min((b - a) / 4.0),
        rel_tol: 1e-12,
        breakpoints: profile.breakpoints(),
        ..AdaptiveOptions::default()
    };
    let (t, r) = (pt.t, pt.r);
    let res = try_integrate(
        |s| {
            let weight = profile.value(s) * s.powi(n as i32 - 2) * kernel.eval(r * s);
            Ok(Complex64::from_polar(weight, t * s))
        },
        a,
        b,
        &opts,
    )?;
    let c = polar_constant(n);
    Ok(ExtensionValue {
        value: res.value * c,
        abs_error: c * (res.abs_error + 1e-13 * res.l1),
    })
}

/// `(f dσ)^∨(t, x)` from the polar formula; finite at `r = 0`.
pub fn extension_direct(profile: &RadialProfile, pt: SpacetimePoint) -> Result<ExtensionValue> {
    radial_integral(profile, &pt, RadialKernel::new(pt.n, Term::Full)?)
}

fn require_far(pt: &SpacetimePoint) -> Result<()> {
    if !(pt.r >= 1.0) {
        return invalid(format!(
            "the main/error split is only offered for r >= 1, got {}",
            pt.r
        ));
    }
    Ok(())
}

/// `c_n r^{-(n-1)/2} [P ∫ F s^{(n-3)/2} e^{i(t+r)s} ds + Q ∫ F s^{(n-3)/2} e^{i(t-r)s} ds]`.
pub fn main_term(profile: &RadialProfile, pt: SpacetimePoint) -> Result<ExtensionValue> {
    require_far(&pt)?;
    let n = pt.n;
    let order = BesselOrder::for_dimension(n)?;
    let (p, q) = bessel::main_term_coefficients(order);
    let (a, b) = profile.support();
    let beta = (n as f64 - 3.0) / 2.0;
    let plus = integrate_oscillatory(profile, beta, &OscillationSpec::new(pt.t + pt.r, a, b)?)?;
    let minus = integrate_oscillatory(profile, beta, &OscillationSpec::new(pt.t - pt.r, a, b)?)?;
    let scale = polar_constant(n) * pt.r.powf(-(n as f64 - 1.0) / 2.0);
    let value = (p * plus.value + q * minus.value) * scale;
    let abs_error = scale * (p.norm() * plus.abs_error + q.norm() * minus.abs_error);
    Ok(ExtensionValue { value, abs_error })
}

/// The remainder `extension - main term`, composed from error-kernel
/// evaluations at `ρ = rs`.
pub fn error_term(profile: &RadialProfile, pt: SpacetimePoint) -> Result<ExtensionValue> {
    require_far(&pt)?;
    if pt.n == 3 {
        return Ok(ExtensionValue {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
        });
    }
    radial_integral(profile, &pt, RadialKernel::new(pt.n, Term::Error)?)
}

/// Evaluates the selected term.
pub fn evaluate(profile: &RadialProfile, pt: SpacetimePoint, term: Term) -> Result<ExtensionValue> {
    match term {
        Term::Full => extension_direct(profile, pt),
        Term::Main => main_term(profile, pt),
        Term::Error => error_term(profile, pt),
    }
}

/// `F_M(s) = F(s/M)` for a level-one profile and dyadic `M`.
pub fn rescale_profile(profile: &RadialProfile, m: f64) -> Result<RadialProfile> {
    profile.rescaled(Dyadic::from_value(m)?)
}

/// Nodes per panel of a frozen trace.
const TRACE_ORDER: usize = 8;

/// `u(t) = Σ_j d_j e^{i t s_j}` at a fixed radius, with the `s`-quadrature frozen
/// for `|t| <= t_bound`.
#[derive(Debug, Clone, Default)]
pub struct FrozenTrace {
    segments: Vec<TraceSegment>,
}

#[derive(Debug, Clone)]
struct TraceSegment {
    first_center: f64,
    width: f64,
    offsets: [f64; TRACE_ORDER],
    coeffs: Vec<[f64; TRACE_ORDER]>,
}

impl FrozenTrace {
    /// Trace of `c_n ∫ F(s) s^{n-2} K(rs) e^{its} ds` for the selected term.
    pub fn build(
        profile: &RadialProfile,
        n: usize,
        term: Term,
        r: f64,
        t_bound: f64,
    ) -> Result<Self> {
        let kernel = RadialKernel::new(n, term)?;
        let mut out = FrozenTrace::default();
        if term == Term::Error && n == 3 {
            return Ok(out);
        }
        let (a, b) = profile.support();
        let max_panel = quarter_period(r + t_bound.abs()).min((b - a) / 8.0);
        let rule = gauss_legendre(TRACE_ORDER);
        let c = polar_constant(n);
        let mut cuts: Vec<f64> = profile.breakpoints();
        cuts.retain(|&x| x >= a && x <= b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let count = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
            let h = (hi - lo) / count as f64;
            let mut offsets = [0.0; TRACE_ORDER];
            for (o, x) in offsets.iter_mut().zip(rule.nodes()) {
                *o = 0.5 * h * x;
            }
            let mut coeffs = Vec::with_capacity(count);
            for p in 0..count {
                let center = lo + h * (p as f64 + 0.5);
                let mut block = [0.0; TRACE_ORDER];
                for k in 0..TRACE_ORDER {
                    let s = center + offsets[k];
                    let w = 0.5 * h * rule.weights()[k];
                    let d = c * w * profile.value(s) * s.powi(n as i32 - 2) * kernel.eval(r * s);
                    block[k] = d;
                }
                coeffs.push(block);
            }
            out.segments.push(TraceSegment {
                first_center: lo + 0.5 * h,
                width: h,
                offsets,
                coeffs,
            });
        }
        Ok(out)
    }

    /// Sum of two traces.
    pub fn extend(&mut self, other: FrozenTrace) {
        self.segments.extend(other.segments);
    }

    pub fn node_count(&self) -> usize {
        self.segments
            .iter()
            .map(|s| s.coeffs.len() * TRACE_ORDER)
            .sum()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for seg in &self.segments {
            let mut phase = [Complex64::new(0.0, 0.0); TRACE_ORDER];
            for (ph, off) in phase.iter_mut().zip(&seg.offsets) {
                *ph = Complex64::from_polar(1.0, t * off);
            }
            let step = Complex64::from_polar(1.0, t * seg.width);
            let mut base = Complex64::from_polar(1.0, t * seg.first_center);
            let mut seg_acc = Complex64::new(0.0, 0.0);
            for (p, block) in seg.coeffs.iter().enumerate() {
                if p % 64 == 63 {
                    base =
                        Complex64::from_polar(1.0, t * (seg.first_center + seg.width * (p as f64)));
                }
                let mut inner = Complex64::new(0.0, 0.0);
                for k in 0..TRACE_ORDER {
                    inner += block[k] * phase[k];
                }
                seg_acc += base * inner;
                base *= step;
            }
            acc += seg_acc;
        }
        acc
    }
}

/// Extension of a profile assembled from dyadic pieces, as a space-time field.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    n: usize,
    term: Term,
    pieces: Vec<RadialProfile>,
}

impl ExtensionField {
    pub fn new(profile: RadialProfile, n: usize, term: Term) -> Result<Self> {
        Self::multi(vec![profile], n, term)
    }

    /// Literal sum of the per-piece extensions.
    pub fn multi(pieces: Vec<RadialProfile>, n: usize, term: Term) -> Result<Self> {
        if pieces.is_empty() {
            return invalid("extension field needs at least one profile");
        }
        BesselOrder::for_dimension(n)?;
        Ok(Self { n, term, pieces })
    }

    pub fn term(&self) -> Term {
        self.term
    }

    pub fn pieces(&self) -> &[RadialProfile] {
        &self.pieces
    }

    /// Pointwise value through the adaptive evaluators.
    pub fn value(&self, t: f64, r: f64) -> Result<ExtensionValue> {
        let pt = SpacetimePoint::new(t, r, self.n)?;
        let mut total = ExtensionValue {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
        };
        for piece in &self.pieces {
            let v = evaluate(piece, pt, self.term)?;
            total.value += v.value;
            total.abs_error += v.abs_error;
        }
        Ok(total)
    }
}

impl SpacetimeField for ExtensionField {
    fn dimension(&self) -> usize {
        self.n
    }

    fn time_layout(&self, r: f64) -> TimeLayout {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut narrowest = f64::INFINITY;
        for p in &self.pieces {
            let (a, b) = p.support();
            lo = lo.min(a);
            hi = hi.max(b);
            narrowest = narrowest.min(b - a);
        }
        let vanishes = self.term == Term::Error && self.n == 3;
        TimeLayout {
            centers: vec![-r, r],
            support: vanishes.then_some((-1.0, 1.0)),
            initial_half_width: (8.0 / narrowest).max(8.0),
            bandwidth: hi - lo,
        }
    }

    fn trace(&self, r: f64, t_bound: f64) -> Result<Trace<'_>> {
        if self.term != Term::Full && r < 1.0 {
            return invalid(format!(
                "the main/error split is only offered for r >= 1, got {r}"
            ));
        }
        let mut trace = FrozenTrace::default();
        for piece in &self.pieces {
            trace.extend(FrozenTrace::build(piece, self.n, self.term, r, t_bound)?);
        }
        Ok(Box::new(move |t| trace.eval(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileShape;
    use crate::special::sphere_area;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> RadialProfile {
        RadialProfile::unit_constant()
    }

    fn pt(t: f64, r: f64, n: usize) -> SpacetimePoint {
        SpacetimePoint::new(t, r, n).unwrap()
    }

    /// `∫₁² ∫₀^{2π} e^{i(r s cos θ + t s)} dθ ds`, trapezoid in θ and Gauss panels in s.
    fn annulus_oracle(t: f64, r: f64) -> Complex64 {
        let theta_steps = 256;
        let rule = gauss_legendre(20);
        let panels = 64;
        let mut total = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = 1.0 + p as f64 / panels as f64;
            for (s, ws) in rule.mapped(lo, lo + 1.0 / panels as f64) {
                let mut ring = Complex64::new(0.0, 0.0);
                for k in 0..theta_steps {
                    let th = 2.0 * PI * k as f64 / theta_steps as f64;
                    ring += Complex64::from_polar(1.0, r * s * th.cos() + t * s);
                }
                total += ring * (ws * 2.0 * PI / theta_steps as f64);
            }
        }
        total
    }

    #[test]
    fn values_at_origin() {
        let v = extension_direct(&unit(), pt(0.0, 0.0, 2)).unwrap();
        assert!((v.value - Complex64::new(2.0 * PI, 0.0)).norm() < 1e-12);
        let v = extension_direct(&unit(), pt(0.0, 0.0, 3)).unwrap();
        assert!((v.value - Complex64::new(6.0 * PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sphere_transform_normalization() {
        // c_n ρ^{-m} J_m(ρ) reproduces the sphere integral: 2π J_0 and 4π sin ρ / ρ.
        let k2 = RadialKernel::new(2, Term::Full).unwrap();
        let k3 = RadialKernel::new(3, Term::Full).unwrap();
        for rho in [0.0005, 0.3, 2.0, 17.0] {
            assert!((polar_constant(3) * k3.eval(rho) - 4.0 * PI * rho.sin() / rho).abs() < 1e-12);
            let j0 = bessel::bessel_j(BesselOrder::new(0.0).unwrap(), rho)
                .unwrap()
                .value
                .re;
            assert!((polar_constant(2) * k2.eval(rho) - 2.0 * PI * j0).abs() < 1e-12);
        }
        assert!(
            (polar_constant(4) * RadialKernel::new(4, Term::Full).unwrap().eval(0.0)
                - sphere_area(4))
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn matches_two_dimensional_oracle() {
        let v = extension_direct(&unit(), pt(1.3, 0.7, 2)).unwrap();
        let o = annulus_oracle(1.3, 0.7);
        assert!(
            (v.value - o).norm() <= 1e-6 * o.norm(),
            "{} vs {o}",
            v.value
        );
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let (t, r) = (rng.gen_range(-6.0..6.0), rng.gen_range(0.0..6.0));
            let v = extension_direct(&unit(), pt(t, r, 2)).unwrap();
            let o = annulus_oracle(t, r);
            assert!(
                (v.value - o).norm() <= 1e-6 * o.norm().max(1e-3),
                "({t},{r})"
            );
        }
    }

    #[test]
    fn n3_main_term_is_everything() {
        let direct = extension_direct(&unit(), pt(0.0, 8.0, 3)).unwrap().value;
        let main = main_term(&unit(), pt(0.0, 8.0, 3)).unwrap().value;
        let err = error_term(&unit(), pt(0.0, 8.0, 3)).unwrap().value;
        assert_eq!(err, Complex64::new(0.0, 0.0));
        assert!((direct - main).norm() < 1e-11 * (1.0 + direct.norm()));
    }

    #[test]
    fn decomposition_identity_holds() {
        let shapes = [
            RadialProfile::unit_constant(),
            RadialProfile::new(ProfileShape::Power(-1.0), (1.0, 2.0)).unwrap(),
            RadialProfile::new(ProfileShape::SmoothBump, (1.0, 2.0)).unwrap(),
            RadialProfile::band_indicator(0.25).unwrap(),
        ];
        for n in 2..=5 {
            for f in &shapes {
                for &(t, r) in &[(0.0, 1.0), (-8.0, 8.0), (3.0, 4.0), (-20.0, 17.5)] {
                    let p = pt(t, r, n);
                    let d = extension_direct(f, p).unwrap().value;
                    let m = main_term(f, p).unwrap().value;
                    let e = error_term(f, p).unwrap().value;
                    assert!(
                        (d - m - e).norm() <= 1e-7 * (1.0 + d.norm()),
                        "n={n} ({t},{r})"
                    );
                }
            }
        }
    }

    #[test]
    fn two_dimensional_main_term_against_oracle() {
        let p = pt(-8.0, 8.0, 2);
        let m = main_term(&unit(), p).unwrap().value;
        let e = error_term(&unit(), p).unwrap().value;
        let o = annulus_oracle(-8.0, 8.0);
        assert!((m - (o - e)).norm() <= 1e-6);
    }

    #[test]
    fn main_term_swap_symmetry() {
        for n in 2..=5 {
            for t in [0.7, 3.0, 11.0] {
                let a = main_term(&unit(), pt(t, 2.0, n)).unwrap().value;
                let b = main_term(&unit(), pt(-t, 2.0, n)).unwrap().value;
                assert!((a.norm() - b.norm()).abs() < 1e-12 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for n in 2..=5 {
            for &(t, r) in &[(0.4, 0.0), (2.5, 3.0), (13.0, 40.0)] {
                let a = extension_direct(&unit(), pt(t, r, n)).unwrap().value;
                let b = extension_direct(&unit(), pt(-t, r, n)).unwrap().value;
                assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn far_field_only_for_split() {
        assert!(main_term(&unit(), pt(0.0, 0.5, 3)).is_err());
        assert!(error_term(&unit(), pt(0.0, 0.99, 2)).is_err());
        assert!(SpacetimePoint::new(0.0, -1.0, 3).is_err());
        assert!(SpacetimePoint::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn five_dimensional_error_term_decays() {
        let e = error_term(&unit(), pt(2.0, 16.0, 5)).unwrap().value.norm();
        // Heuristic size r^{-3} ∫ F s^0 ds up to the kernel constant.
        assert!(e <= 50.0 * 16f64.powi(-3), "{e}");
        assert!(e > 0.0);
    }

    #[test]
    fn rescaling_identity() {
        let f = unit();
        assert_eq!(rescale_profile(&f, 1.0).unwrap(), f);
        assert!(rescale_profile(&f, 3.0).is_err());
        let f4 = rescale_profile(&f, 4.0).unwrap();
        let lhs = extension_direct(&f4, pt(0.5, 2.0, 2)).unwrap().value;
        let rhs = extension_direct(&f, pt(2.0, 8.0, 2)).unwrap().value * 4.0;
        assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm());
        let band = rescale_profile(&RadialProfile::band_indicator(0.125).unwrap(), 2.0).unwrap();
        assert_eq!(band.support(), (2.0, 2.25));
    }

    #[test]
    fn frozen_trace_matches_adaptive_evaluation() {
        let f = RadialProfile::new(ProfileShape::SmoothBump, (1.0, 2.0)).unwrap();
        for n in [2, 3, 5] {
            for term in [Term::Full, Term::Main, Term::Error] {
                let r = 37.0;
                let trace = FrozenTrace::build(&f, n, term, r, 80.0).unwrap();
                for t in [-80.0, -37.5, 0.0, 12.0, 36.0, 79.0] {
                    let want = evaluate(&f, pt(t, r, n), term).unwrap().value;
                    let got = trace.eval(t);
                    assert!(
                        (got - want).norm() <= 1e-10 * (1.0 + want.norm()),
                        "n={n} {term} t={t}"
                    );
                }
            }
        }
        let band = RadialProfile::band_indicator(0.5).unwrap();
        let trace = FrozenTrace::build(&band, 3, Term::Full, 0.01, 200.0).unwrap();
        let want = extension_direct(&band, pt(150.0, 0.01, 3)).unwrap().value;
        assert!((trace.eval(150.0) - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn boundedness_by_profile_mass() {
        let f = RadialProfile::new(ProfileShape::Power(2.0), (1.0, 2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5 {
            let bound = polar_constant(n)
                * RadialKernel::new(n, Term::Full).unwrap().eval(0.0)
                * f.weighted_power_integral(1.0, n as f64 - 2.0);
            for _ in 0..10 {
                let p = pt(rng.gen_range(-20.0..20.0), rng.gen_range(0.0..20.0), n);
                assert!(extension_direct(&f, p).unwrap().value.norm() <= bound * (1.0 + 1e-12));
            }
        }
    }
}
