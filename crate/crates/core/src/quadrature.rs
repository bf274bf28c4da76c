//! Composite Gauss–Legendre quadrature with nested-panel error estimates,
//! the oscillatory radial integral `∫ F(s) s^β e^{iωs} ds`, and adaptive
//! truncation of time integrals over the real line.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::profile::RadialProfile;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    /// Applies the rule on `[a, b]`; returns `(Σ w f, Σ w |f|)`.
    pub fn apply<V: QuadValue>(
        &self,
        f: &mut impl FnMut(f64) -> Result<V>,
        a: f64,
        b: f64,
    ) -> Result<(V, f64)> {
        let mut acc = V::default();
        let mut abs = 0.0;
        for (x, w) in self.mapped(a, b) {
            let v = f(x)?;
            abs += w * v.magnitude();
            acc = acc + v * w;
        }
        Ok((acc, abs))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 1 {
        return (x, 1.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const MAX_CACHED_ORDER: usize = 64;

/// Shared, lazily built rule of the given order (1..=64).
pub fn gauss_legendre(order: usize) -> &'static GaussLegendre {
    static RULES: [OnceLock<GaussLegendre>; MAX_CACHED_ORDER + 1] =
        [const { OnceLock::new() }; MAX_CACHED_ORDER + 1];
    assert!(
        (1..=MAX_CACHED_ORDER).contains(&order),
        "unsupported Gauss-Legendre order {order}"
    );
    RULES[order].get_or_init(|| GaussLegendre::new(order))
}

/// Values that quadrature can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Integral value with a nonnegative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub abs_error: f64,
    /// Estimate of `∫ |f|`, the scale against which relative tolerances act.
    pub l1: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    pub order: usize,
    /// Upper bound on the width of every panel, before and after refinement.
    pub max_panel: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Points where the integrand may jump or kink; panels never straddle them.
    pub breakpoints: Vec<f64>,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            order: 16,
            max_panel: f64::INFINITY,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_depth: 24,
            breakpoints: Vec::new(),
        }
    }
}

/// Splits `[a, b]` at the interior breakpoints, then into equal panels no
/// wider than `max_panel`.
pub fn initial_panels(a: f64, b: f64, breakpoints: &[f64], max_panel: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);
    let mut panels = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        let count = if max_panel.is_finite() && max_panel > 0.0 {
            (len / max_panel).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = len / count as f64;
        for k in 0..count {
            let p_lo = lo + h * k as f64;
            let p_hi = if k + 1 == count {
                hi
            } else {
                lo + h * (k + 1) as f64
            };
            panels.push((p_lo, p_hi));
        }
    }
    panels
}

/// Adaptive composite Gauss–Legendre integration of a fallible integrand.
///
/// Each panel is compared against its two halves; the difference is the
/// panel's error estimate and the halves are kept when it is small enough.
pub fn try_integrate<V: QuadValue>(
    mut f: impl FnMut(f64) -> Result<V>,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<QuadratureResult<V>> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return invalid(format!("bad integration interval [{a}, {b}]"));
    }
    if b == a {
        return Ok(QuadratureResult {
            value: V::default(),
            abs_error: 0.0,
            l1: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let rule = gauss_legendre(opts.order);
    let panels = initial_panels(a, b, &opts.breakpoints, opts.max_panel);
    let total_len = b - a;

    let mut evaluations = 0usize;
    let mut stack: Vec<(f64, f64, V, u32)> = Vec::with_capacity(panels.len());
    let mut l1_coarse = 0.0;
    for &(lo, hi) in &panels {
        let (v, abs) = rule.apply(&mut f, lo, hi)?;
        evaluations += rule.order();
        l1_coarse += abs;
        stack.push((lo, hi, v, 0));
    }
    let tol = opts.abs_tol.max(opts.rel_tol * l1_coarse);

    let mut value = V::default();
    let mut err_sum = 0.0;
    let mut l1 = 0.0;
    let mut converged = true;
    // Process left to right so the summation order is deterministic.
    stack.reverse();
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, left_abs) = rule.apply(&mut f, lo, mid)?;
        let (right, right_abs) = rule.apply(&mut f, mid, hi)?;
        evaluations += 2 * rule.order();
        let fine = left + right;
        let err = (fine - coarse).magnitude();
        let allowed = tol * (hi - lo) / total_len;
        if err <= allowed || depth >= opts.max_depth || mid <= lo || mid >= hi {
            if err > allowed {
                converged = false;
            }
            value = value + fine;
            err_sum += err;
            l1 += left_abs + right_abs;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    let rounding = 8.0 * f64::EPSILON * l1;
    Ok(QuadratureResult {
        value,
        abs_error: err_sum + rounding,
        l1,
        evaluations,
        converged,
    })
}

/// Infallible convenience wrapper around [`try_integrate`].
pub fn integrate<V: QuadValue>(
    f: impl Fn(f64) -> V,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> QuadratureResult<V> {
    try_integrate(|x| Ok(f(x)), a, b, opts).expect("infallible integrand")
}

/// Frequency and interval of a one-dimensional oscillatory integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationSpec {
    pub omega: f64,
    pub interval: (f64, f64),
}

impl OscillationSpec {
    pub fn new(omega: f64, a: f64, b: f64) -> Result<Self> {
        if !omega.is_finite() || omega.abs() >= 1e9 {
            return invalid(format!("frequency {omega} outside |omega| < 1e9"));
        }
        if !(a > 0.0) {
            return invalid(format!("interval [{a}, {b}] touches or crosses 0"));
        }
        if !(b >= a) || !b.is_finite() {
            return invalid(format!("interval [{a}, {b}] is malformed"));
        }
        Ok(Self {
            omega,
            interval: (a, b),
        })
    }

    /// Quarter of the oscillation period, the largest admissible panel.
    pub fn max_panel(&self) -> f64 {
        quarter_period(self.omega)
    }
}

/// `π / (2|ω|)`, or infinity for `ω = 0`.
pub fn quarter_period(omega: f64) -> f64 {
    if omega == 0.0 {
        f64::INFINITY
    } else {
        PI / (2.0 * omega.abs())
    }
}

/// Panel layout used by [`integrate_oscillatory`] before refinement.
pub fn oscillatory_panels(spec: &OscillationSpec, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    initial_panels(
        spec.interval.0,
        spec.interval.1,
        breakpoints,
        spec.max_panel(),
    )
}

/// `∫ F(s) s^β e^{iωs} ds` over the spec interval.
pub fn integrate_oscillatory(
    profile: &RadialProfile,
    beta: f64,
    spec: &OscillationSpec,
) -> Result<QuadratureResult<Complex64>> {
    let (a, b) = spec.interval;
    let (sa, sb) = profile.support();
    let slack = 1e-12 * sb.abs().max(1.0);
    if sa < a - slack || sb > b + slack {
        return invalid(format!(
            "profile support [{sa}, {sb}] not inside [{a}, {b}]"
        ));
    }
    if !profile.is_bounded() {
        return invalid("profile is unbounded");
    }
    if !beta.is_finite() {
        return invalid("non-finite power");
    }
    let opts = AdaptiveOptions {
        max_panel: spec.max_panel(),
        rel_tol: 1e-12,
        breakpoints: profile.breakpoints(),
        ..AdaptiveOptions::default()
    };
    let omega = spec.omega;
    let res = try_integrate(
        |s| {
            let (sin, cos) = (omega * s).sin_cos();
            Ok(Complex64::new(cos, sin) * (profile.value(s) * s.powf(beta)))
        },
        sa.max(a),
        sb.min(b),
        &opts,
    )?;
    if !res.converged {
        return Err(Error::QuadratureNonConvergence(format!(
            "oscillatory integral at omega = {omega} stalled with error {:.3e}",
            res.abs_error
        )));
    }
    Ok(res)
}

/// Parameters for [`adaptive_time_truncation`].
#[derive(Debug, Clone)]
pub struct TruncationRequest {
    pub q: f64,
    /// Points the integrand concentrates around; windows are centred there.
    pub centers: Vec<f64>,
    /// Admissible ratio of omitted mass to captured mass.
    pub tol: f64,
    pub initial_half_width: f64,
    /// Known compact support in `t`; skips the window search entirely.
    pub support: Option<(f64, f64)>,
    /// Panel cap for the captured-mass integral.
    pub max_panel: f64,
    pub max_doublings: u32,
}

impl TruncationRequest {
    pub fn new(q: f64, centers: Vec<f64>, tol: f64) -> Self {
        Self {
            q,
            centers,
            tol,
            initial_half_width: 8.0,
            support: None,
            max_panel: 2.0,
            max_doublings: 4,
        }
    }
}

/// Windows chosen by [`adaptive_time_truncation`] and the mass they hold.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationOutcome {
    pub windows: Vec<(f64, f64)>,
    pub half_width: f64,
    /// `∫_windows |g|^q dt`.
    pub mass: f64,
    pub mass_error: f64,
    /// Upper estimate of `∫_outside |g|^q dt`.
    pub tail_bound: f64,
    pub doublings: u32,
}

/// Chooses windows around each centre so that the analytically bounded
/// `|t - c|^{-1}` tail of `|g|^q` is at most `tol` times the captured mass.
pub fn adaptive_time_truncation(
    g: impl Fn(f64) -> Complex64,
    req: &TruncationRequest,
) -> Result<TruncationOutcome> {
    adaptive_time_truncation_with(|_| Ok(&g), req)
}

/// Like [`adaptive_time_truncation`], but `build(t_bound)` produces a trace
/// valid on `|t| <= t_bound`; it is rebuilt whenever the windows grow.
pub fn adaptive_time_truncation_with<G, B>(
    mut build: B,
    req: &TruncationRequest,
) -> Result<TruncationOutcome>
where
    G: Fn(f64) -> Complex64,
    B: FnMut(f64) -> Result<G>,
{
    let q = req.q;
    if !(q > 1.0) || !q.is_finite() {
        return invalid(format!("time truncation needs finite q > 1, got {q}"));
    }
    if !(req.tol > 0.0) {
        return invalid("truncation tolerance must be positive");
    }
    let mass_opts = AdaptiveOptions {
        max_panel: req.max_panel,
        rel_tol: (req.tol * 1e-2).max(1e-12),
        order: 16,
        ..AdaptiveOptions::default()
    };

    if let Some((lo, hi)) = req.support {
        let bound = lo.abs().max(hi.abs());
        let g = build(bound)?;
        let res = try_integrate(|t| Ok(g(t).norm().powf(q)), lo, hi, &mass_opts)?;
        return Ok(TruncationOutcome {
            windows: vec![(lo, hi)],
            half_width: 0.5 * (hi - lo),
            mass: res.value,
            mass_error: res.abs_error,
            tail_bound: 0.0,
            doublings: 0,
        });
    }
    if req.centers.is_empty() {
        return invalid("no time centres supplied");
    }
    if !(req.initial_half_width > 0.0) {
        return invalid("initial window must be positive");
    }

    let max_center = req.centers.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut half_width = req.initial_half_width;
    let mut first_mass = None;
    for doubling in 0..=req.max_doublings {
        let g = build(max_center + 2.0 * half_width)?;
        let windows = merged_windows(&req.centers, half_width);
        let mut mass = 0.0;
        let mut mass_error = 0.0;
        for &(lo, hi) in &windows {
            let res = try_integrate(|t| Ok(g(t).norm().powf(q)), lo, hi, &mass_opts)?;
            mass += res.value;
            mass_error += res.abs_error;
        }
        let envelope = tail_envelope(&g, &req.centers, &windows, half_width);
        let tail_bound =
            req.centers.len() as f64 * 2.0 * envelope.powf(q) * half_width.powf(1.0 - q)
                / (q - 1.0);
        let start = *first_mass.get_or_insert(mass);
        let outcome = TruncationOutcome {
            windows,
            half_width,
            mass,
            mass_error,
            tail_bound,
            doublings: doubling,
        };
        if tail_bound <= req.tol * mass {
            return Ok(outcome);
        }
        if doubling == req.max_doublings {
            let drift = (mass - start).abs();
            if drift <= req.tol * mass {
                return Ok(outcome);
            }
            return Err(Error::TruncationNonConvergence(format!(
                "captured mass drifted by {:.3e} (relative) over {} doublings; tail bound {:.3e}",
                drift / mass.max(f64::MIN_POSITIVE),
                req.max_doublings,
                tail_bound
            )));
        }
        half_width *= 2.0;
    }
    unreachable!("loop returns on its last iteration")
}

/// Union of `[c - h, c + h]` over the centres, as disjoint sorted intervals.
pub fn merged_windows(centers: &[f64], half_width: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = centers
        .iter()
        .map(|&c| (c - half_width, c + half_width))
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Estimates `C` in `|g(t)| <= C / dist(t, centres)` from samples in the
/// band of width `half_width` just outside the windows.
fn tail_envelope(
    g: &impl Fn(f64) -> Complex64,
    centers: &[f64],
    windows: &[(f64, f64)],
    half_width: f64,
) -> f64 {
    const SAMPLES: usize = 64;
    let inside = |t: f64| windows.iter().any(|&(lo, hi)| t > lo && t < hi);
    let dist = |t: f64| {
        centers
            .iter()
            .fold(f64::INFINITY, |m, c| m.min((t - c).abs()))
    };
    let mut c_max: f64 = 0.0;
    for &(lo, hi) in windows {
        for k in 0..=SAMPLES {
            let frac = k as f64 / SAMPLES as f64;
            for t in [hi + frac * half_width, lo - frac * half_width] {
                if inside(t) {
                    continue;
                }
                c_max = c_max.max(g(t).norm() * dist(t));
            }
        }
    }
    c_max
}
