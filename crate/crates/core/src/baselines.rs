//! The Personalized-DP Sample mechanism.
//!
//! Every record of group `i` is kept independently with probability
//! `min(1, (e^eps_i - 1) / (e^t - 1))`; the kept records are pooled and
//! handed to an ordinary `t`-DP mechanism.

use std::fmt;
use std::str::FromStr;

use crate::analysis::{optimal_threshold, shapes};
use crate::error::{invalid, Error, Result};
use crate::estimators::{Estimate, PrivacyGroup};
use crate::mechanisms::{exp_mech_quantile, DataDomain, LaplaceNoise, PrivacyLevel, RandomStream};

/// Absolute tolerance of the optimised-threshold search.
pub const THRESHOLD_TOLERANCE: f64 = 1e-4;

/// How the threshold `t` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdStrategy {
    Min,
    Average,
    Max,
    /// Minimiser of the predicted (expected-sample-size) variance.
    Optimized,
    Fixed(f64),
}

impl ThresholdStrategy {
    pub fn label(&self) -> String {
        match self {
            Self::Min => "min".into(),
            Self::Average => "average".into(),
            Self::Max => "max".into(),
            Self::Optimized => "optimized".into(),
            Self::Fixed(t) => format!("fixed={t}"),
        }
    }
}

impl fmt::Display for ThresholdStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ThresholdStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "min" => Ok(Self::Min),
            "average" | "avg" => Ok(Self::Average),
            "max" => Ok(Self::Max),
            "optimized" => Ok(Self::Optimized),
            _ => {
                let t = s
                    .strip_prefix("fixed=")
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| invalid(format!("unknown threshold strategy {s:?}")))?;
                if t.is_finite() && t > 0.0 {
                    Ok(Self::Fixed(t))
                } else {
                    Err(invalid(format!("fixed threshold must be finite and > 0, got {t}")))
                }
            }
        }
    }
}

/// Which records survived inclusion sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleOutcome {
    pub included: Vec<Vec<bool>>,
    pub t: f64,
    pub sampled_counts: Vec<usize>,
}

impl SampleOutcome {
    pub fn total(&self) -> usize {
        self.sampled_counts.iter().sum()
    }

    /// Values of all kept records, clamped to the domain, in group order.
    pub fn pooled(&self, groups: &[PrivacyGroup], domain: &DataDomain) -> Vec<f64> {
        groups
            .iter()
            .zip(&self.included)
            .flat_map(|(g, keep)| {
                g.values()
                    .iter()
                    .zip(keep)
                    .filter(|(_, k)| **k)
                    .map(|(&x, _)| domain.clamp(x))
            })
            .collect()
    }
}

/// `min(1, (e^eps - 1) / (e^t - 1))`; public records are always kept.
pub fn inclusion_probability(level: PrivacyLevel, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("threshold must be finite and > 0, got {t}")));
    }
    Ok(match level {
        PrivacyLevel::Public => 1.0,
        PrivacyLevel::Finite(eps) => (eps.exp_m1() / t.exp_m1()).min(1.0),
    })
}

/// Resolves a strategy to a concrete threshold for these groups.
///
/// Min and Average range over the finite epsilons. Max is undefined when a
/// public group is present. Optimized searches `[eps_min, eps_max]`.
pub fn select_threshold(strategy: ThresholdStrategy, groups: &[PrivacyGroup], domain: &DataDomain) -> Result<f64> {
    select_threshold_for(strategy, &shapes(groups), domain)
}

pub(crate) fn select_threshold_for(
    strategy: ThresholdStrategy,
    shapes: &[(usize, PrivacyLevel)],
    domain: &DataDomain,
) -> Result<f64> {
    if let ThresholdStrategy::Fixed(t) = strategy {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid(format!("fixed threshold must be finite and > 0, got {t}")));
        }
        return Ok(t);
    }
    let finite: Vec<f64> = shapes.iter().filter_map(|(_, l)| l.epsilon()).collect();
    if finite.is_empty() {
        return Err(invalid("threshold selection needs at least one group with finite epsilon"));
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let has_public = shapes.iter().any(|(_, l)| l.is_public());
    match strategy {
        ThresholdStrategy::Min => Ok(min),
        ThresholdStrategy::Average => Ok(finite.iter().sum::<f64>() / finite.len() as f64),
        ThresholdStrategy::Max if has_public => Err(invalid("max threshold is undefined with public groups")),
        ThresholdStrategy::Max => Ok(max),
        ThresholdStrategy::Optimized => optimal_threshold(shapes, domain, min, max, THRESHOLD_TOLERANCE),
        ThresholdStrategy::Fixed(_) => unreachable!(),
    }
}

/// Draws the inclusion pattern at threshold `t`.
pub fn pdp_sample(groups: &[PrivacyGroup], t: f64, stream: &mut RandomStream) -> Result<SampleOutcome> {
    let mut included = Vec::with_capacity(groups.len());
    let mut sampled_counts = Vec::with_capacity(groups.len());
    for g in groups {
        let p = inclusion_probability(g.level(), t)?;
        let keep: Vec<bool> = (0..g.n()).map(|_| stream.bernoulli(p)).collect();
        sampled_counts.push(keep.iter().filter(|k| **k).count());
        included.push(keep);
    }
    Ok(SampleOutcome {
        included,
        t,
        sampled_counts,
    })
}

fn noise_stream(stream: &RandomStream) -> RandomStream {
    RandomStream::derive(stream.seed(), &[stream.stream_id(), u64::MAX])
}

/// Sample-mechanism mean at a given threshold:
/// `(sum of kept values + Lap(r / t)) / N_s`.
pub fn pdp_sample_mean_at(
    groups: &[PrivacyGroup],
    t: f64,
    domain: &DataDomain,
    stream: &mut RandomStream,
) -> Result<Estimate> {
    if groups.is_empty() {
        return Err(crate::error::empty("no groups"));
    }
    let outcome = pdp_sample(groups, t, stream)?;
    let pooled = outcome.pooled(groups, domain);
    if pooled.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let noise = LaplaceNoise::calibrated(domain.r(), t)?.sample(&mut noise_stream(stream));
    Ok(Estimate {
        value: (pooled.iter().sum::<f64>() + noise) / pooled.len() as f64,
        theoretical_variance: None,
    })
}

pub fn pdp_sample_mean(
    groups: &[PrivacyGroup],
    strategy: ThresholdStrategy,
    domain: &DataDomain,
    stream: &mut RandomStream,
) -> Result<Estimate> {
    let t = select_threshold(strategy, groups, domain)?;
    pdp_sample_mean_at(groups, t, domain, stream)
}

/// Sample mechanism wrapped around the exponential-mechanism quantile at
/// level `t`.
pub fn pdp_sample_quantile_at(
    groups: &[PrivacyGroup],
    q: f64,
    t: f64,
    domain: &DataDomain,
    stream: &mut RandomStream,
) -> Result<Estimate> {
    if groups.is_empty() {
        return Err(crate::error::empty("no groups"));
    }
    let outcome = pdp_sample(groups, t, stream)?;
    let pooled = outcome.pooled(groups, domain);
    if pooled.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let value = exp_mech_quantile(&pooled, q, t, domain, &mut noise_stream(stream))?;
    Ok(Estimate {
        value,
        theoretical_variance: None,
    })
}

pub fn pdp_sample_quantile(
    groups: &[PrivacyGroup],
    q: f64,
    strategy: ThresholdStrategy,
    domain: &DataDomain,
    stream: &mut RandomStream,
) -> Result<Estimate> {
    let t = select_threshold(strategy, groups, domain)?;
    pdp_sample_quantile_at(groups, q, t, domain, stream)
}
