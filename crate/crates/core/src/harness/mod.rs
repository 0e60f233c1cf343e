//! Monte-Carlo experiment engine.
//!
//! Trials are keyed by `(sweep index, trial id)` for data and
//! `(sweep index, method index, trial id)` for mechanism randomness. Each
//! trial draws one dataset that every method then releases from. Results are
//! reduced in key order, so serial and parallel runs write identical files.

mod config;
mod results;
mod stats;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::analysis::predicted_pdp_variance_for;
use crate::baselines::{pdp_sample_mean_at, pdp_sample_quantile_at, select_threshold_for};
use crate::error::{Error, Result};
use crate::estimators::{mixed_mean, mixed_quantile, variance_for, PrivacyGroup};
use crate::mechanisms::{exact_quantile, DataDomain, PrivacyLevel, RandomStream};

pub use config::{default_methods, ExperimentConfig, Method, RmseReference, Statistic, Sweep, DEFAULT_BOOTSTRAP_RESAMPLES};
pub use results::{format_float, parse_csv, to_csv, TrialStats, CSV_HEADER};
pub use stats::{bootstrap_ci, rmse, sample_variance, Headline};

const DATA_STREAM: u64 = 1;
const MECHANISM_STREAM: u64 = 2;
const BOOTSTRAP_STREAM: u64 = 3;

/// Stream for one trial's synthetic data.
pub fn data_stream(config: &ExperimentConfig, sweep_index: usize, trial_id: usize) -> RandomStream {
    RandomStream::derive(config.seed, &[DATA_STREAM, sweep_index as u64, trial_id as u64])
}

/// Draws `normal(mu, sigma2)` values for every group, clamped to the domain.
pub fn generate_groups(config: &ExperimentConfig, sizes: &[usize], stream: &mut RandomStream) -> Result<Vec<PrivacyGroup>> {
    let (a, b) = config.domain;
    let normal = Normal::new(config.mu, config.sigma2.sqrt())
        .map_err(|e| Error::InvalidParameter(format!("normal distribution: {e}")))?;
    sizes
        .iter()
        .zip(&config.epsilons)
        .map(|(&n, &level)| {
            let values = (0..n).map(|_| normal.sample(stream).clamp(a, b)).collect();
            PrivacyGroup::new(values, level)
        })
        .collect()
}

/// Population value of the configured statistic for `normal(mu, sigma2)`,
/// clamped to the domain.
pub fn population_statistic(config: &ExperimentConfig) -> f64 {
    let v = match config.statistic {
        Statistic::Mean => config.mu,
        Statistic::Quantile(q) if config.sigma2 > 0.0 => NormalDist::new(config.mu, config.sigma2.sqrt())
            .map(|d| d.inverse_cdf(q))
            .unwrap_or(config.mu),
        Statistic::Quantile(_) => config.mu,
    };
    v.clamp(config.domain.0, config.domain.1)
}

fn sample_statistic(config: &ExperimentConfig, groups: &[PrivacyGroup]) -> Result<f64> {
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.values().iter().copied()).collect();
    match config.statistic {
        Statistic::Mean => Ok(pooled.iter().sum::<f64>() / pooled.len() as f64),
        Statistic::Quantile(q) => exact_quantile(&pooled, q),
    }
}

/// A method with everything that does not depend on the trial data resolved.
#[derive(Clone, Copy, Debug)]
enum Prepared {
    Mixed,
    Pdp(f64),
}

struct SweepPoint {
    value: f64,
    sizes: Vec<usize>,
    prepared: Vec<Prepared>,
    theoretical: Vec<Option<f64>>,
}

fn prepare(config: &ExperimentConfig, domain: &DataDomain, value: f64) -> Result<SweepPoint> {
    let sizes = config.sizes_at(value);
    let shapes: Vec<(usize, PrivacyLevel)> = sizes.iter().copied().zip(config.epsilons.iter().copied()).collect();
    let mut prepared = Vec::new();
    let mut theoretical = Vec::new();
    for m in &config.methods {
        match m {
            Method::Mixed => {
                prepared.push(Prepared::Mixed);
                theoretical.push(match config.statistic {
                    Statistic::Mean => {
                        let precision: f64 = shapes.iter().map(|&(n, l)| 1.0 / variance_for(n, l, domain)).sum();
                        Some(1.0 / precision)
                    }
                    Statistic::Quantile(_) => None,
                });
            }
            Method::PdpSample(strategy) => {
                let t = select_threshold_for(*strategy, &shapes, domain)?;
                prepared.push(Prepared::Pdp(t));
                theoretical.push(match config.statistic {
                    Statistic::Mean => Some(predicted_pdp_variance_for(&shapes, t, domain)?),
                    Statistic::Quantile(_) => None,
                });
            }
        }
    }
    Ok(SweepPoint {
        value,
        sizes,
        prepared,
        theoretical,
    })
}

/// Threshold each PDP method resolves to at every sweep value, as
/// `(method label, sweep value, t)`.
pub fn resolved_thresholds(config: &ExperimentConfig) -> Result<Vec<(String, f64, f64)>> {
    let domain = DataDomain::new(config.domain.0, config.domain.1, config.sigma2)?;
    let mut out = Vec::new();
    for value in config.sweep.values() {
        let point = prepare(config, &domain, value)?;
        for (m, p) in config.methods.iter().zip(&point.prepared) {
            if let Prepared::Pdp(t) = p {
                out.push((m.label(), value, *t));
            }
        }
    }
    Ok(out)
}

type TrialOutcome = (f64, Vec<Option<f64>>);

fn run_trial(
    config: &ExperimentConfig,
    domain: &DataDomain,
    sweep_index: usize,
    point: &SweepPoint,
    trial_id: usize,
    population: f64,
) -> Result<TrialOutcome> {
    let groups = generate_groups(config, &point.sizes, &mut data_stream(config, sweep_index, trial_id))?;
    let truth = match config.rmse_reference {
        RmseReference::Population => population,
        RmseReference::Sample => sample_statistic(config, &groups)?,
    };
    let mut estimates = Vec::with_capacity(point.prepared.len());
    for (m_idx, p) in point.prepared.iter().enumerate() {
        let mut stream = RandomStream::derive(
            config.seed,
            &[MECHANISM_STREAM, sweep_index as u64, m_idx as u64, trial_id as u64],
        );
        let est = match (config.statistic, *p) {
            (Statistic::Mean, Prepared::Mixed) => mixed_mean(&groups, domain, &mut stream),
            (Statistic::Mean, Prepared::Pdp(t)) => pdp_sample_mean_at(&groups, t, domain, &mut stream),
            (Statistic::Quantile(q), Prepared::Mixed) => mixed_quantile(&groups, q, domain, &mut stream),
            (Statistic::Quantile(q), Prepared::Pdp(t)) => pdp_sample_quantile_at(&groups, q, t, domain, &mut stream),
        };
        match est {
            Ok(e) => estimates.push(Some(e.value)),
            Err(Error::DegenerateSample) => estimates.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok((truth, estimates))
}

/// Runs every method for `config.trials` trials at every sweep value.
///
/// Empirical variance is taken about the mean of the successful estimates;
/// RMSE is taken about the reference statistic. The bootstrap interval is on
/// the variance for means and on the RMSE for quantiles. Trials where the
/// Sample mechanism kept no records count as failures and are excluded.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialStats>> {
    config.validate()?;
    let domain = DataDomain::new(config.domain.0, config.domain.1, config.sigma2)?;
    let population = population_statistic(config);
    let headline = match config.statistic {
        Statistic::Mean => Headline::Variance,
        Statistic::Quantile(_) => Headline::Rmse,
    };

    let mut rows = Vec::new();
    for (sweep_index, value) in config.sweep.values().into_iter().enumerate() {
        let point = prepare(config, &domain, value)?;
        let trial = |id: usize| run_trial(config, &domain, sweep_index, &point, id, population);
        let outcomes: Vec<TrialOutcome> = if config.parallel {
            (0..config.trials).into_par_iter().map(trial).collect::<Result<_>>()?
        } else {
            (0..config.trials).map(trial).collect::<Result<_>>()?
        };

        for (m_idx, method) in config.methods.iter().enumerate() {
            let (xs, truth): (Vec<f64>, Vec<f64>) = outcomes
                .iter()
                .filter_map(|(t, est)| est[m_idx].map(|x| (x, *t)))
                .unzip();
            let mut boot = RandomStream::derive(config.seed, &[BOOTSTRAP_STREAM, sweep_index as u64, m_idx as u64]);
            let (ci95_low, ci95_high) = bootstrap_ci(&xs, &truth, headline, config.bootstrap_resamples, &mut boot);
            rows.push(TrialStats {
                method: method.label(),
                sweep_param: config.sweep.name().to_string(),
                sweep_value: point.value,
                trials: config.trials,
                failures: config.trials - xs.len(),
                emp_variance: sample_variance(&xs),
                rmse: rmse(&xs, &truth),
                ci95_low,
                ci95_high,
                theoretical_variance: point.theoretical[m_idx],
            });
        }
    }
    Ok(rows)
}

/// `key = value` lines describing the run, including the defaults that are
/// artifact choices rather than fixed experiment parameters.
pub fn metadata(config: &ExperimentConfig) -> String {
    let reference = match config.rmse_reference {
        RmseReference::Population => "population",
        RmseReference::Sample => "sample",
    };
    let mut out = String::new();
    out.push_str(&format!("crate_version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("seed = {}\ntrials = {}\n", config.seed, config.trials));
    out.push_str(&format!(
        "domain = {}, {}    # artifact choice: clamping range\n",
        config.domain.0, config.domain.1
    ));
    out.push_str(&format!("rmse_reference = {reference}    # artifact choice\n"));
    out.push_str(&format!(
        "bootstrap_resamples = {}    # percentile bootstrap\n",
        config.bootstrap_resamples
    ));
    if let Sweep::LowShare(v) = &config.sweep {
        let shares: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!(
            "low_share = {}    # artifact choice: group split grid\n",
            shares.join(", ")
        ));
    }
    out.push_str("pdp_optimized = argmin of expected-sample-size variance, golden-section to 1e-4\n");
    out
}
