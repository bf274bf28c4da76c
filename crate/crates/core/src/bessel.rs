//! Bessel functions `J_m` of half-integer-compatible order and their split into a
//! two-exponential main term plus an exponentially damped error kernel.
//!
//! With `a = m - 1/2` and the integral representation
//! `J_m(ρ) = (ρ/2)^m / (Γ(m+½)√π) ∫_{-1}^{1} e^{iρu} (1-u²)^a du`, rotating the
//! contour onto the rays `u = ±1 + iy` gives
//!
//! ```text
//! J_m(ρ) = ρ^{-1/2} (P e^{iρ} + Q e^{-iρ})
//!        + (ρ/2)^m / (Γ(m+½)√π) · i [e^{-iρ} E₊(ρ) - e^{iρ} E₋(ρ)]
//! E±(ρ)  = ∫₀^∞ e^{-ρy} y^a [(y ± 2i)^a - (±2i)^a] dy
//! ```
//!
//! with `P = -i e^{-iπa/2}/√(2π)` and `Q = conj(P)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;
use crate::special::gamma;

/// Below this argument `bessel_j` sums the power series.
pub const SERIES_CUTOFF: f64 = 12.0;
/// Below this argument `scaled_bessel_j` uses the two-term Taylor form.
pub const TINY_ARGUMENT: f64 = 1e-3;

/// Square of the truncation point of the kernel integral in the variable `w = √(ρy)`.
const KERNEL_W2: f64 = 60.0;
/// Above this argument the kernel is summed from its asymptotic expansion.
const KERNEL_ASYMPTOTIC: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselOrder {
    m: f64,
}

impl BesselOrder {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return invalid(format!(
                "Bessel order {m} must be a finite nonnegative number"
            ));
        }
        Ok(Self { m })
    }

    /// `m = (n - 2)/2`.
    pub fn for_dimension(n: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!("dimension {n} must be at least 2"));
        }
        Self::new((n as f64 - 2.0) / 2.0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Returns `l` when `m = l + 1/2`.
    pub fn half_integer_index(&self) -> Option<usize> {
        let l = self.m - 0.5;
        (l >= 0.0 && l.fract() == 0.0).then_some(l as usize)
    }

    /// `a = m - 1/2`, the exponent in the kernel.
    pub fn kernel_exponent(&self) -> f64 {
        self.m - 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorKernelSign {
    Plus,
    Minus,
}

impl ErrorKernelSign {
    pub const ALL: [ErrorKernelSign; 2] = [ErrorKernelSign::Plus, ErrorKernelSign::Minus];

    fn shift(self) -> Complex64 {
        match self {
            ErrorKernelSign::Plus => Complex64::new(0.0, 2.0),
            ErrorKernelSign::Minus => Complex64::new(0.0, -2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselValue {
    pub value: Complex64,
    pub abs_error: f64,
}

impl BesselValue {
    fn real(value: f64, abs_error: f64) -> Self {
        Self {
            value: Complex64::new(value, 0.0),
            abs_error,
        }
    }
}

fn check_argument(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return invalid(format!(
            "Bessel argument {r} must be finite and nonnegative"
        ));
    }
    Ok(())
}

/// `J_m(r)` by the most accurate available path.
pub fn bessel_j(order: BesselOrder, r: f64) -> Result<BesselValue> {
    check_argument(r)?;
    if r == 0.0 {
        return Ok(BesselValue::real(
            if order.m == 0.0 { 1.0 } else { 0.0 },
            0.0,
        ));
    }
    match order.half_integer_index() {
        Some(0) => bessel_j_half_integer(order, r),
        _ if r < SERIES_CUTOFF => bessel_j_series(order, r),
        Some(_) => bessel_j_half_integer(order, r),
        None => bessel_j_split(order, r),
    }
}

/// Power series, summed in double-double arithmetic so that cancellation stays
/// harmless up to `r ≈ 50`.
pub fn bessel_j_series(order: BesselOrder, r: f64) -> Result<BesselValue> {
    check_argument(r)?;
    let m = order.m;
    if r == 0.0 {
        return Ok(BesselValue::real(if m == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    let half = r / 2.0;
    let x = Dd::from(half).mul(Dd::from(half));
    let mut term = Dd::from(1.0);
    let mut sum = term;
    let mut max_term: f64 = 1.0;
    let mut k = 0.0;
    loop {
        term = term.mul(x).div(k + 1.0).div(k + m + 1.0).neg();
        sum = sum.add(term);
        max_term = max_term.max(term.hi.abs());
        k += 1.0;
        if k > x.hi && term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
        if k > 10_000.0 {
            break;
        }
    }
    let prefactor = half.powf(m) / gamma(m + 1.0);
    let value = prefactor * sum.to_f64();
    let abs_error = prefactor * (max_term * 1e-30 + sum.hi.abs() * 2.0 * f64::EPSILON);
    Ok(BesselValue::real(value, abs_error))
}

/// Closed form for `m = l + 1/2` through the spherical Bessel recurrence.
pub fn bessel_j_half_integer(order: BesselOrder, r: f64) -> Result<BesselValue> {
    let Some(l) = order.half_integer_index() else {
        return invalid(format!("order {} is not a half-integer", order.m));
    };
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("closed half-integer form needs r > 0, got {r}"));
    }
    if l == 0 {
        let value = (2.0 / (PI * r)).sqrt() * r.sin();
        return Ok(BesselValue::real(
            value,
            2.0 * f64::EPSILON * (2.0 / (PI * r)).sqrt(),
        ));
    }
    // Upward recurrence for r·j_l(r); stable while r ≥ l.
    let mut prev = r.sin();
    let mut cur = r.sin() / r - r.cos();
    for k in 1..l {
        let next = (2 * k + 1) as f64 / r * cur - prev;
        prev = cur;
        cur = next;
    }
    let scale = (2.0 / (PI * r)).sqrt();
    let growth = if r >= l as f64 {
        1.0
    } else {
        (l as f64 / r).powi(l as i32)
    };
    Ok(BesselValue::real(
        scale * cur,
        scale * 8.0 * (l as f64 + 1.0) * growth * f64::EPSILON,
    ))
}

/// `J_m(r)` as main term plus error term.
pub fn bessel_j_split(order: BesselOrder, r: f64) -> Result<BesselValue> {
    let main = bessel_main_term(order, r)?;
    let err = bessel_error_term(order, r)?;
    Ok(BesselValue {
        value: main + err.value,
        abs_error: err.abs_error + 4.0 * f64::EPSILON * main.norm(),
    })
}

/// Coefficients `(P, Q)` of `r^{-1/2} e^{ir}` and `r^{-1/2} e^{-ir}` in the main term.
pub fn main_term_coefficients(order: BesselOrder) -> (Complex64, Complex64) {
    let a = order.kernel_exponent();
    let norm = 1.0 / (2.0 * PI).sqrt();
    let phase = Complex64::from_polar(norm, -PI * a / 2.0);
    let plus = Complex64::new(0.0, -1.0) * phase;
    (plus, plus.conj())
}

/// `r^{-1/2} (P e^{ir} + Q e^{-ir}) = √(2/(πr)) sin(r - πa/2)`.
pub fn bessel_main_term(order: BesselOrder, r: f64) -> Result<Complex64> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("main term needs r > 0, got {r}"));
    }
    let a = order.kernel_exponent();
    let value = if a == 0.0 {
        (2.0 / (PI * r)).sqrt() * r.sin()
    } else {
        (2.0 / (PI * r)).sqrt() * (r - PI * a / 2.0).sin()
    };
    Ok(Complex64::new(value, 0.0))
}

/// `(1/2)^m / (Γ(m+½)√π)`, the constant in front of the error term.
pub fn error_term_constant(order: BesselOrder) -> f64 {
    0.5f64.powf(order.m) / (gamma(order.m + 0.5) * PI.sqrt())
}

/// `J_m(r) - bessel_main_term(r)`, valid for every `r > 0`.
pub fn bessel_error_term(order: BesselOrder, r: f64) -> Result<BesselValue> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("error term needs r > 0, got {r}"));
    }
    let (kernel, kernel_err) = kernel_fast(order.kernel_exponent(), r, ErrorKernelSign::Plus);
    let pref = error_term_constant(order) * r.powf(order.m);
    let rotated = Complex64::from_polar(1.0, -r) * kernel;
    Ok(BesselValue {
        value: Complex64::new(-2.0 * pref * rotated.im, 0.0),
        abs_error: 2.0 * pref * kernel_err,
    })
}

/// Quadrature rule for the kernel integral: `panels` equal panels of Gauss order `order`
/// on the truncated `w` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelRule {
    pub panels: usize,
    pub order: usize,
}

impl Default for KernelRule {
    fn default() -> Self {
        Self {
            panels: 8,
            order: 16,
        }
    }
}

impl KernelRule {
    pub fn refined(self) -> Self {
        Self {
            panels: self.panels * 2,
            order: self.order,
        }
    }

    /// Rule resolving the branch point at `|w| = √(2ρ)` for small `ρ`.
    fn for_rho(rho: f64) -> Self {
        let width = rho.sqrt().min(1.0);
        Self {
            panels: (KERNEL_W2.sqrt() / width).ceil().max(8.0) as usize,
            order: 16,
        }
    }
}

/// `E±(r)` for ambient dimension `n`, with a nested-rule error estimate.
pub fn error_kernel(n: usize, r: f64, sign: ErrorKernelSign) -> Result<BesselValue> {
    error_kernel_with(n, r, sign, KernelRule::default())
}

/// `E±(r)` with an explicit base rule; the reported error is the difference from
/// the rule with doubled panel count plus the analytic tail bound.
pub fn error_kernel_with(
    n: usize,
    r: f64,
    sign: ErrorKernelSign,
    rule: KernelRule,
) -> Result<BesselValue> {
    if n < 2 {
        return invalid(format!("dimension {n} must be at least 2"));
    }
    if !(r >= 1.0 && r.is_finite()) {
        return invalid(format!("error kernel is only offered for r >= 1, got {r}"));
    }
    if rule.panels == 0 || rule.order == 0 || rule.order > 64 {
        return invalid("kernel rule needs panels >= 1 and order in 1..=64");
    }
    let a = (n as f64 - 3.0) / 2.0;
    if a == 0.0 {
        return Ok(BesselValue {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
        });
    }
    let (coarse, tail) = kernel_quadrature(a, r, sign, rule);
    let (fine, _) = kernel_quadrature(a, r, sign, rule.refined());
    Ok(BesselValue {
        value: fine,
        abs_error: (fine - coarse).norm() + tail,
    })
}

/// Exact kernel for integer `a`: `Σ_{k=1}^{a} C(a,k) c^{a-k} (a+k)! / r^{a+k+1}`.
pub fn error_kernel_exact_odd(n: usize, r: f64, sign: ErrorKernelSign) -> Result<Complex64> {
    if n < 3 || n.is_multiple_of(2) {
        return invalid(format!("exact kernel needs odd n >= 3, got {n}"));
    }
    if !(r > 0.0) {
        return invalid(format!("kernel argument must be positive, got {r}"));
    }
    Ok(kernel_integer(((n - 3) / 2) as i32, r, sign.shift()))
}

fn kernel_integer(a: i32, r: f64, c: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    for k in 1..=a {
        binom *= (a - k + 1) as f64 / k as f64;
        let fact: f64 = (1..=(a + k)).map(|j| j as f64).product();
        sum += c.powi(a - k) * (binom * fact / r.powi(a + k + 1));
    }
    sum
}

/// Fastest accurate kernel path for any `ρ > 0`: exact for integer `a`, asymptotic
/// expansion for large `ρ`, otherwise a fixed Gauss rule in `w`.
pub(crate) fn kernel_fast(a: f64, rho: f64, sign: ErrorKernelSign) -> (Complex64, f64) {
    if a == 0.0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    if a.fract() == 0.0 && a > 0.0 {
        let v = kernel_integer(a as i32, rho, sign.shift());
        return (v, 16.0 * f64::EPSILON * v.norm());
    }
    if rho >= KERNEL_ASYMPTOTIC {
        if let Some(v) = kernel_asymptotic(a, rho, sign) {
            return v;
        }
    }
    let (v, tail) = kernel_quadrature(a, rho, sign, KernelRule::for_rho(rho));
    (v, tail + 1e-13 * v.norm())
}

/// Watson expansion `c^a Σ_k C(a,k) Γ(a+k+1) / (c^k ρ^{a+k+1})`, truncated at its
/// smallest term. Returns `None` if the terms never get small enough.
fn kernel_asymptotic(a: f64, rho: f64, sign: ErrorKernelSign) -> Option<(Complex64, f64)> {
    let c = sign.shift();
    let ca = c.powf(a);
    // Term k = 1: a · Γ(a+2) / (c ρ^{a+2}).
    let mut coeff = Complex64::new(a * gamma(a + 2.0), 0.0) / c / rho.powf(a + 2.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let size = coeff.norm();
        if size > prev {
            return None;
        }
        sum += coeff;
        if size <= 1e-17 * sum.norm() {
            let v = ca * sum;
            return Some((v, 2.0 * size * ca.norm() + 4.0 * f64::EPSILON * v.norm()));
        }
        prev = size;
        let kf = k as f64;
        // C(a,k+1)/C(a,k) = (a-k)/(k+1); Γ(a+k+2)/Γ(a+k+1) = a+k+1.
        coeff = coeff * ((a - kf) / (kf + 1.0) * (a + kf + 1.0) / rho) / c;
    }
    None
}

/// `(y + c)^a - c^a`, switching to the binomial series when `|y/c|` is small.
fn kernel_bracket(a: f64, y: f64, c: Complex64, ca: Complex64) -> Complex64 {
    let z = y / c;
    if z.norm() < 0.125 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..40 {
            term = term * z * ((a - k as f64) / (k as f64 + 1.0));
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        ca * sum
    } else {
        (c + y).powf(a) - ca
    }
}

/// `E = ρ^{-a-1} ∫₀^W 2 w^{2a+1} e^{-w²} [(w²/ρ + c)^a - c^a] dw` (substitution `y = w²/ρ`);
/// returns the value and the bound on the omitted tail `w > W`.
fn kernel_quadrature(
    a: f64,
    rho: f64,
    sign: ErrorKernelSign,
    rule: KernelRule,
) -> (Complex64, f64) {
    let c = sign.shift();
    let ca = c.powf(a);
    let wmax = KERNEL_W2.sqrt();
    let gl = gauss_legendre(rule.order);
    let h = wmax / rule.panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..rule.panels {
        let lo = p as f64 * h;
        for (w, wt) in gl.mapped(lo, lo + h) {
            let w2 = w * w;
            let weight = 2.0 * w.powf(2.0 * a + 1.0) * (-w2).exp();
            sum += kernel_bracket(a, w2 / rho, c, ca) * (weight * wt);
        }
    }
    let scale = rho.powf(-a - 1.0);
    // The integrand's log-derivative is below -W on the tail, so the tail is at most g(W)/W.
    let bracket_max = 2.0 * 2f64.powf(a).max((KERNEL_W2 / rho + 2.0).powf(a));
    let edge = 2.0 * wmax.powf(2.0 * a + 1.0) * (-KERNEL_W2).exp() * bracket_max;
    (sum * scale, scale * edge / wmax)
}

/// `(r, max_± |E±(r)| r^{(n+1)/2})` along the grid.
pub fn verify_error_bound(n: usize, r_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    verify_error_bound_with(n, r_grid, KernelRule::default())
}

pub fn verify_error_bound_with(
    n: usize,
    r_grid: &[f64],
    rule: KernelRule,
) -> Result<Vec<(f64, f64)>> {
    if r_grid.is_empty() {
        return invalid("error-bound grid is empty");
    }
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("error-bound grid must be increasing");
    }
    r_grid
        .iter()
        .map(|&r| {
            let mut worst: f64 = 0.0;
            for sign in ErrorKernelSign::ALL {
                let e = error_kernel_with(n, r, sign, rule)?;
                worst = worst.max(e.value.norm());
            }
            Ok((r, worst * r.powf((n as f64 + 1.0) / 2.0)))
        })
        .collect()
}

/// `ρ^{-m} J_m(ρ)`, finite at `ρ = 0`.
pub fn scaled_bessel_j(order: BesselOrder, rho: f64) -> f64 {
    let m = order.m;
    if rho < TINY_ARGUMENT {
        let lead = 0.5f64.powf(m) / gamma(m + 1.0);
        return lead * (1.0 - rho * rho / (4.0 * (m + 1.0)));
    }
    if m == 0.5 {
        return (2.0 / PI).sqrt() * rho.sin() / rho;
    }
    let j = match bessel_j(order, rho) {
        Ok(v) => v.value.re,
        Err(_) => f64::NAN,
    };
    if m == 0.0 {
        j
    } else {
        j / rho.powf(m)
    }
}

/// Double-double number `hi + lo`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = q1 * d;
        let pe = q1.mul_add(d, -p);
        let (s, e) = two_sum(self.hi, -p);
        let q2 = (s + (e - pe + self.lo)) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
