//! Differential-privacy primitives.
//!
//! Everything here is pure given a [`RandomStream`]: the same seed, stream id
//! and parameters reproduce the same output bit-for-bit.

mod laplace;
mod quantile;
mod random;

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

pub use laplace::{laplace_mechanism, sample_laplace, LaplaceNoise};
pub use quantile::{exact_quantile, exp_mech_interval_probabilities, exp_mech_quantile, IntervalWeights};
pub use random::{stream_id_for, RandomStream};

/// Privacy requirement of a group: a finite `epsilon > 0`, or public data
/// (`epsilon = infinity`), which is never turned into a noise scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrivacyLevel {
    Finite(f64),
    Public,
}

impl PrivacyLevel {
    pub fn finite(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self::Finite(epsilon))
        } else {
            Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")))
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Self::Finite(e) => Some(e),
            Self::Public => None,
        }
    }

    pub fn is_public(&self) -> bool {
        matches!(self, Self::Public)
    }
}

impl fmt::Display for PrivacyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(e) => write!(f, "{e}"),
            Self::Public => f.write_str("public"),
        }
    }
}

impl FromStr for PrivacyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("public") || s.eq_ignore_ascii_case("inf") {
            return Ok(Self::Public);
        }
        let e: f64 = s
            .parse()
            .map_err(|_| invalid(format!("cannot parse epsilon {s:?}")))?;
        Self::finite(e)
    }
}

/// Value range `[a, b]` of the data together with the assumed data variance.
///
/// `r = max(|a|, |b|)` bounds how much one user can move a group sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataDomain {
    a: f64,
    b: f64,
    r: f64,
    sigma2: f64,
}

impl DataDomain {
    pub fn new(a: f64, b: f64, sigma2: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("domain needs finite a < b, got [{a}, {b}]")));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(invalid(format!("sigma2 must be finite and > 0, got {sigma2}")));
        }
        Ok(Self {
            a,
            b,
            r: a.abs().max(b.abs()),
            sigma2,
        })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    /// Sensitivity of a group sum.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.a, self.b)
    }
}

/// Effective privacy level of an `epsilon`-DP mechanism run on a Poisson
/// subsample at rate `p`: `ln(1 + (e^epsilon - 1) / p)`.
pub fn amplified_epsilon(epsilon: f64, p: f64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("sampling rate must lie in (0, 1], got {p}")));
    }
    Ok((epsilon.exp_m1() / p).ln_1p())
}
