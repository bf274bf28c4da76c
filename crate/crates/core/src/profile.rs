//! Radial traces `F(s) = f(|ξ|, ξ)` of cylindrically symmetric data on the cone.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{invalid, Result};
use crate::quadrature::{integrate, AdaptiveOptions};
use crate::special::sphere_area;

/// Shape of a radial profile, evaluated in reference coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileShape {
    Constant,
    /// `s^k`.
    Power(f64),
    /// `exp(-1/(1-u²))` with `u` mapping the support onto `(-1, 1)`.
    SmoothBump,
    /// Indicator of `[1, 1 + δ]`.
    BandIndicator(f64),
    /// Piecewise-linear interpolation through `(grid, values)`.
    Sampled {
        grid: Vec<f64>,
        values: Vec<f64>,
    },
}

/// A radial profile supported on `[a, b]` inside one dyadic shell `[M, 2M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    shape: ProfileShape,
    /// Support in reference coordinates.
    base: (f64, f64),
    /// Frequency dilation: `F(s) = amplitude · shape(s / scale)`.
    scale: f64,
    amplitude: f64,
    level: Dyadic,
}

impl RadialProfile {
    pub fn new(shape: ProfileShape, support: (f64, f64)) -> Result<Self> {
        let (a, b) = support;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return invalid(format!("support [{a}, {b}] must satisfy 0 < a < b"));
        }
        match &shape {
            ProfileShape::BandIndicator(delta) => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return invalid(format!("band width {delta} outside (0, 1]"));
                }
                if a != 1.0 || b != 1.0 + delta {
                    return invalid("band indicator must be supported on [1, 1 + delta]");
                }
            }
            ProfileShape::Sampled { grid, values } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return invalid(
                        "sampled profile needs matching grid and values of length >= 2",
                    );
                }
                if grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return invalid("sampled grid must be strictly increasing");
                }
                if grid[0] != a || grid[grid.len() - 1] != b {
                    return invalid("sampled grid must span the support exactly");
                }
            }
            ProfileShape::Power(k) if !k.is_finite() => {
                return invalid("power exponent must be finite")
            }
            _ => {}
        }
        let level = shell_of(a, b)?;
        Ok(Self {
            shape,
            base: support,
            scale: 1.0,
            amplitude: 1.0,
            level,
        })
    }

    /// `F ≡ 1` on `[1, 2]`.
    pub fn unit_constant() -> Self {
        Self::new(ProfileShape::Constant, (1.0, 2.0)).expect("valid support")
    }

    /// Indicator of `[1, 1 + delta]`.
    pub fn band_indicator(delta: f64) -> Result<Self> {
        Self::new(ProfileShape::BandIndicator(delta), (1.0, 1.0 + delta))
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let support = (
            grid.first().copied().unwrap_or(f64::NAN),
            grid.last().copied().unwrap_or(f64::NAN),
        );
        Self::new(ProfileShape::Sampled { grid, values }, support)
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn support(&self) -> (f64, f64) {
        (self.base.0 * self.scale, self.base.1 * self.scale)
    }

    pub fn dyadic_level(&self) -> Dyadic {
        self.level
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// `F_M(s) = F(s / M)`; only defined for profiles at level 1.
    pub fn rescaled(&self, m: Dyadic) -> Result<Self> {
        if self.level != Dyadic::ONE {
            return invalid(format!(
                "rescaling requires dyadic level 1, profile is at {}",
                self.level
            ));
        }
        let mut out = self.clone();
        out.scale = self.scale * m.value();
        out.level = Dyadic(self.level.0 + m.0);
        Ok(out)
    }

    pub fn value(&self, s: f64) -> f64 {
        let x = s / self.scale;
        let (a, b) = self.base;
        if x < a || x > b {
            return 0.0;
        }
        let v = match &self.shape {
            ProfileShape::Constant | ProfileShape::BandIndicator(_) => 1.0,
            ProfileShape::Power(k) => x.powf(*k),
            ProfileShape::SmoothBump => {
                let u = (2.0 * x - a - b) / (b - a);
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - u * u)).exp()
                }
            }
            ProfileShape::Sampled { grid, values } => interpolate(grid, values, x),
        };
        self.amplitude * v
    }

    /// Points where the profile may jump or kink, in actual coordinates.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.support();
        let mut out = vec![a, b];
        if let ProfileShape::Sampled { grid, .. } = &self.shape {
            out.extend(grid.iter().map(|g| g * self.scale));
        }
        out
    }

    pub fn is_bounded(&self) -> bool {
        if !self.amplitude.is_finite() {
            return false;
        }
        match &self.shape {
            ProfileShape::Sampled { values, .. } => values.iter().all(|v| v.is_finite()),
            ProfileShape::Power(k) => {
                let (a, b) = self.base;
                a.powf(*k).is_finite() && b.powf(*k).is_finite()
            }
            _ => true,
        }
    }

    /// `∫ |F(s)|^p s^w ds`.
    pub fn weighted_power_integral(&self, p: f64, w: f64) -> f64 {
        let (a, b) = self.support();
        let opts = AdaptiveOptions {
            rel_tol: 1e-13,
            breakpoints: self.breakpoints(),
            max_panel: (b - a) / 16.0,
            ..AdaptiveOptions::default()
        };
        integrate(|s| self.value(s).abs().powf(p) * s.powf(w), a, b, &opts).value
    }

    /// `‖f‖_{L^p(S, dσ)} = (|S^{n-1}| ∫ |F(s)|^p s^{n-2} ds)^{1/p}`.
    pub fn cone_lp_norm(&self, n: usize, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        (sphere_area(n) * self.weighted_power_integral(p, n as f64 - 2.0)).powf(1.0 / p)
    }

    /// `‖F‖_{L^p(ds)}` on the radial line.
    pub fn radial_lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        self.weighted_power_integral(p, 0.0).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        let (a, b) = self.support();
        let mut m: f64 = 0.0;
        let mut probe = |s: f64| m = m.max(self.value(s).abs());
        for bp in self.breakpoints() {
            probe(bp);
        }
        for k in 0..=4096 {
            probe(a + (b - a) * k as f64 / 4096.0);
        }
        m
    }
}

fn shell_of(a: f64, b: f64) -> Result<Dyadic> {
    let exp = a.log2().floor() as i32;
    for e in [exp - 1, exp, exp + 1] {
        let m = (e as f64).exp2();
        if m <= a && b <= 2.0 * m {
            return Ok(Dyadic(e));
        }
    }
    invalid(format!(
        "support [{a}, {b}] does not fit inside a dyadic shell [M, 2M]"
    ))
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let idx = grid.partition_point(|&g| g <= x);
    if idx == 0 {
        return values[0];
    }
    if idx >= grid.len() {
        return values[values.len() - 1];
    }
    let (x0, x1) = (grid[idx - 1], grid[idx]);
    let t = (x - x0) / (x1 - x0);
    values[idx - 1] * (1.0 - t) + values[idx] * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn support_must_sit_in_a_dyadic_shell() {
        assert_eq!(RadialProfile::unit_constant().dyadic_level(), Dyadic(0));
        let p = RadialProfile::new(ProfileShape::Constant, (2.5, 3.5)).unwrap();
        assert_eq!(p.dyadic_level(), Dyadic(1));
        assert!(RadialProfile::new(ProfileShape::Constant, (1.5, 3.5)).is_err());
        assert!(RadialProfile::new(ProfileShape::Constant, (0.0, 1.0)).is_err());
    }

    #[test]
    fn band_invariants() {
        assert!(RadialProfile::band_indicator(0.0).is_err());
        assert!(RadialProfile::band_indicator(1.5).is_err());
        let band = RadialProfile::band_indicator(0.25).unwrap();
        assert_eq!(band.support(), (1.0, 1.25));
        assert_eq!(band.value(1.1), 1.0);
        assert_eq!(band.value(1.3), 0.0);
    }

    #[test]
    fn sampled_profiles_interpolate_linearly() {
        let p = RadialProfile::sampled(vec![1.0, 1.5, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((p.value(1.25) - 0.5).abs() < 1e-15);
        assert!((p.value(1.75) - 0.5).abs() < 1e-15);
        assert!(p.breakpoints().contains(&1.5));
        assert!(RadialProfile::sampled(vec![1.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(RadialProfile::sampled(vec![1.0, 2.0], vec![0.0]).is_err());
    }

    #[test]
    fn rescaling_moves_the_support() {
        let band = RadialProfile::band_indicator(0.125).unwrap();
        let scaled = band.rescaled(Dyadic(1)).unwrap();
        assert_eq!(scaled.support(), (2.0, 2.25));
        assert_eq!(scaled.dyadic_level(), Dyadic(1));
        assert!(scaled.rescaled(Dyadic(1)).is_err());
        let p = RadialProfile::new(ProfileShape::Power(2.0), (1.0, 2.0)).unwrap();
        let p4 = p.rescaled(Dyadic(2)).unwrap();
        assert!((p4.value(6.0) - p.value(1.5)).abs() < 1e-15);
    }

    #[test]
    fn cone_norm_of_constant() {
        // ‖1‖_{L^2(S,dσ)} in n = 3: 4π ∫_1^2 s ds = 6π.
        let p = RadialProfile::unit_constant();
        assert!((p.cone_lp_norm(3, 2.0) - (6.0 * PI).sqrt()).abs() < 1e-12);
        assert!((p.radial_lp_norm(3.0) - 1.0).abs() < 1e-13);
        assert_eq!(p.cone_lp_norm(3, f64::INFINITY), 1.0);
    }

    #[test]
    fn bump_vanishes_at_edges() {
        let p = RadialProfile::new(ProfileShape::SmoothBump, (1.0, 2.0)).unwrap();
        assert_eq!(p.value(1.0), 0.0);
        assert_eq!(p.value(2.0), 0.0);
        assert!((p.value(1.5) - (-1.0f64).exp()).abs() < 1e-15);
    }
}
