//! Dyadic numbers `2^k` and contiguous ranges of them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A dyadic number `2^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dyadic(pub i32);

impl Dyadic {
    pub const ONE: Dyadic = Dyadic(0);

    /// Recovers the exponent of an exact power of two.
    pub fn from_value(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return invalid(format!("{x} is not a positive dyadic number"));
        }
        let exp = x.log2().round() as i32;
        if (exp as f64).exp2() == x {
            Ok(Dyadic(exp))
        } else {
            invalid(format!("{x} is not dyadic"))
        }
    }

    pub fn exponent(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        (self.0 as f64).exp2()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.0)
    }
}

/// Inclusive range `2^lo ..= 2^hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRange {
    pub lo: i32,
    pub hi: i32,
}

impl DyadicRange {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return invalid(format!("empty dyadic range 2^{lo}..2^{hi}"));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = Dyadic> + Clone {
        (self.lo..=self.hi).map(Dyadic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognises_powers_of_two() {
        assert_eq!(Dyadic::from_value(8.0).unwrap(), Dyadic(3));
        assert_eq!(Dyadic::from_value(0.125).unwrap(), Dyadic(-3));
        assert!(Dyadic::from_value(3.0).is_err());
        assert!(Dyadic::from_value(0.0).is_err());
        assert!(Dyadic::from_value(-2.0).is_err());
    }

    #[test]
    fn range_iterates_inclusively() {
        let r = DyadicRange::new(-1, 2).unwrap();
        let v: Vec<f64> = r.iter().map(Dyadic::value).collect();
        assert_eq!(v, vec![0.5, 1.0, 2.0, 4.0]);
        assert!(DyadicRange::new(2, 1).is_err());
    }
}
