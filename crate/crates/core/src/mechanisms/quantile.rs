use super::{DataDomain, RandomStream};
use crate::error::{empty, invalid, Result};

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("quantile level must lie in (0, 1), got {q}")))
    }
}

fn sorted_finite(data: &[f64]) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(empty("quantile of an empty dataset"));
    }
    if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
        return Err(invalid(format!("non-finite data value {bad}")));
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Non-private quantile: the order statistic at 1-indexed rank `ceil(q n)`.
pub fn exact_quantile(data: &[f64], q: f64) -> Result<f64> {
    check_q(q)?;
    let v = sorted_finite(data)?;
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Ok(v[rank - 1])
}

/// Selection distribution of the exponential-mechanism quantile.
///
/// Interval `i` is `[bounds[i], bounds[i + 1])`, with `i` data points below
/// it; `probabilities[i]` is its selection probability.
#[derive(Clone, Debug)]
pub struct IntervalWeights {
    pub bounds: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Computes the interval selection probabilities for the private quantile.
///
/// Data are clamped to the domain and sorted, and the domain endpoints are
/// added as sentinels. Interval `i` has utility `-|i - q n|` (sensitivity 1)
/// and weight `length * exp(epsilon * utility / 2)`. Empty intervals get
/// probability exactly zero.
pub fn exp_mech_interval_probabilities(
    data: &[f64],
    q: f64,
    epsilon: f64,
    domain: &DataDomain,
) -> Result<IntervalWeights> {
    check_q(q)?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    let clamped: Vec<f64> = data.iter().map(|&x| domain.clamp(x)).collect();
    let sorted = sorted_finite(&clamped)?;
    let n = sorted.len();
    let target = q * n as f64;

    let mut bounds = Vec::with_capacity(n + 2);
    bounds.push(domain.lower());
    bounds.extend_from_slice(&sorted);
    bounds.push(domain.upper());

    let log_weights: Vec<f64> = bounds
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let len = w[1] - w[0];
            if len > 0.0 {
                len.ln() - epsilon * (i as f64 - target).abs() / 2.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let probabilities = weights.into_iter().map(|w| w / total).collect();
    Ok(IntervalWeights {
        bounds,
        probabilities,
    })
}

/// Private `q`-quantile via the exponential mechanism over the gaps between
/// sorted data points. Returns a uniform draw inside the selected gap.
pub fn exp_mech_quantile(
    data: &[f64],
    q: f64,
    epsilon: f64,
    domain: &DataDomain,
    stream: &mut RandomStream,
) -> Result<f64> {
    let iw = exp_mech_interval_probabilities(data, q, epsilon, domain)?;
    let u = stream.uniform();
    let mut acc = 0.0;
    let mut chosen = None;
    for (i, &p) in iw.probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        chosen = Some(i);
        acc += p;
        if u < acc {
            break;
        }
    }
    // at least one interval has positive length because a < b
    let i = chosen.expect("no interval with positive length");
    let (lo, hi) = (iw.bounds[i], iw.bounds[i + 1]);
    Ok(lo + stream.uniform() * (hi - lo))
}
