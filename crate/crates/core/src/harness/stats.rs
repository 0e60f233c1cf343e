//! Moments and percentile-bootstrap intervals over trial outputs.

use crate::mechanisms::RandomStream;

/// Unbiased sample variance; NaN for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Root mean squared error of `xs` against per-trial references.
pub fn rmse(xs: &[f64], truth: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mse = xs.iter().zip(truth).map(|(x, t)| (x - t).powi(2)).sum::<f64>() / xs.len() as f64;
    mse.sqrt()
}

/// Which statistic a bootstrap interval is built around.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Headline {
    Variance,
    Rmse,
}

impl Headline {
    pub fn eval(&self, xs: &[f64], truth: &[f64]) -> f64 {
        match self {
            Self::Variance => sample_variance(xs),
            Self::Rmse => rmse(xs, truth),
        }
    }
}

/// Percentile-bootstrap 95% interval of `headline`, widened if needed so it
/// always contains the point estimate.
pub fn bootstrap_ci(
    xs: &[f64],
    truth: &[f64],
    headline: Headline,
    resamples: usize,
    stream: &mut RandomStream,
) -> (f64, f64) {
    let point = headline.eval(xs, truth);
    if xs.len() < 2 || !point.is_finite() {
        return (point, point);
    }
    let n = xs.len();
    let mut bx = vec![0.0; n];
    let mut bt = vec![0.0; n];
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for k in 0..n {
                let i = stream.index(n);
                bx[k] = xs[i];
                bt[k] = truth[i];
            }
            headline.eval(&bx, &bt)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let lo = percentile(&stats, 0.025);
    let hi = percentile(&stats, 0.975);
    (lo.min(point), hi.max(point))
}

/// Linear-interpolated percentile of sorted data.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}
