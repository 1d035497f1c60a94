use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deployment fraction `γ ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Gamma(f64);

impl Gamma {
    pub const ONE: Gamma = Gamma(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Gamma(value))
        }
    }

    /// Like [`Gamma::new`] but also excludes `γ = 1`.
    pub fn proper(value: f64) -> Result<Self> {
        if value < 1.0 {
            Self::new(value)
        } else {
            Err(Error::Gamma(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `⌊γn⌋`, the number of nodes deployed at this fraction.
    pub fn retained(self, n: usize) -> usize {
        floor_product(self.0, n)
    }
}

impl TryFrom<f64> for Gamma {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Gamma> for f64 {
    fn from(g: Gamma) -> f64 {
        g.0
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `⌊x·n⌋` where products that land within rounding error of an integer are
/// taken to be that integer, so `0.29 · 100` gives 29 rather than 28.
pub(crate) fn floor_product(x: f64, n: usize) -> usize {
    let p = x * n as f64;
    let nearest = p.round();
    if (p - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest as usize
    } else {
        p.floor() as usize
    }
}
