//! Exponent bookkeeping and the numerical experiments built on the extension operator.

mod global;
mod schur;
mod sweep;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{invalid, Result};

pub use global::{
    band_sharpness, equal_mass_levels, global_restriction_check, multi_band, BandOptions,
    BandPoint, BandReport, GlobalOptions, GlobalReport,
};
pub use schur::{kernel_term, kernel_term_pair, schur_sum, SchurResult};
pub use sweep::{dyadic_sweep, fit_slope, sweep_norm_power, SlopeFit, SweepOptions, SweepPoint};

/// Structured outcomes attached to report rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Divergent,
    TruncationUnstable,
    ExcludedFromFit,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Divergent => "divergent",
            Flag::TruncationUnstable => "truncation-unstable",
            Flag::ExcludedFromFit => "excluded-from-fit",
        })
    }
}

/// `(n, p, q)` with the conjugate `p'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

impl ExponentTriple {
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        if n < 2 {
            return invalid(format!("dimension {n} must be at least 2"));
        }
        if !(p >= 1.0) {
            return invalid(format!("p = {p} must lie in [1, inf]"));
        }
        if !(q > 0.0) {
            return invalid(format!("q = {q} must lie in (0, inf]"));
        }
        Ok(Self { n, p, q })
    }

    /// `1/p'` = `1 - 1/p`.
    pub fn inv_p_conj(&self) -> f64 {
        1.0 - 1.0 / self.p
    }

    pub fn p_conj(&self) -> f64 {
        1.0 / self.inv_p_conj()
    }

    /// `2n/(n-1)`.
    pub fn critical_q(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 1.0)
    }

    /// `q > 2n/(n-1)`, compared as `q(n-1) > 2n`.
    pub fn above_critical(&self) -> bool {
        self.q * (self.n as f64 - 1.0) > 2.0 * self.n as f64
    }

    /// The far-field exponent `-(n-1)/2 + n/q`.
    pub fn far_field_exponent(&self) -> f64 {
        -(self.n as f64 - 1.0) / 2.0 + self.n as f64 / self.q
    }

    /// The near-field exponent `n/q`.
    pub fn near_field_exponent(&self) -> f64 {
        self.n as f64 / self.q
    }
}

/// Regions of the `(p, q)` plane a triple belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    /// `q > 2n/(n-1)` and `(n+1)/q <= (n-1)/p'`.
    pub conjecture_region: bool,
    /// `(n+1)/q = (n-1)/p'`.
    pub scaling_critical_line: bool,
    /// `q >= max(2, p')` and `q > 2n/(n-1)`.
    pub dyadic_extended_region: bool,
    /// `p = 2` and `q >= 2(n+1)/(n-1)`.
    pub cordoba_stein_region: bool,
}

const RELATION_TOL: f64 = 1e-12;

pub fn feasibility_classify(exps: &ExponentTriple) -> Feasibility {
    let n = exps.n as f64;
    let lhs = (n + 1.0) / exps.q;
    let rhs = (n - 1.0) * exps.inv_p_conj();
    let slack = RELATION_TOL * lhs.abs().max(rhs.abs()).max(1.0);
    let above = exps.above_critical();
    let p_conj = exps.p_conj();
    Feasibility {
        conjecture_region: above && lhs <= rhs + slack,
        scaling_critical_line: (lhs - rhs).abs() <= slack,
        dyadic_extended_region: above && exps.q >= p_conj.max(2.0),
        cordoba_stein_region: exps.p == 2.0 && exps.q * (n - 1.0) >= 2.0 * (n + 1.0),
    }
}

/// `α(K)`: `-(n-1)/2 + n/q` for `K >= 2` and `(n-1)/q` for `K <= 1`.
pub fn alpha(n: usize, q: f64, k: Dyadic) -> f64 {
    let nf = n as f64;
    if k.exponent() >= 1 {
        -(nf - 1.0) / 2.0 + nf / q
    } else {
        (nf - 1.0) / q
    }
}
