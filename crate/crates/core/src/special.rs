//! Gamma function and sphere areas.

use std::f64::consts::PI;

/// `Γ(x)` for `x > 0`; exact recurrence from `Γ(1) = 1` and `Γ(1/2) = √π`
/// whenever `2x` is an integer (up to 170).
pub fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if twice == twice.round() && x > 0.0 && x <= 170.0 {
        let (mut acc, mut base) = if twice as i64 % 2 == 0 {
            (1.0, 1.0)
        } else {
            (PI.sqrt(), 0.5)
        };
        while base < x {
            acc *= base;
            base += 1.0;
        }
        return acc;
    }
    libm::tgamma(x)
}

/// Surface area `|S^{n-1}| = 2π^{n/2} / Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_integers() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(5.0), 24.0);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(2.5) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert!((gamma(1.3) - 0.897_470_696_306_277_2).abs() < 1e-14);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
