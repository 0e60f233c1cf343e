//! Mixed estimators: independent per-group releases combined with
//! inverse-variance weights.
//!
//! Group `i` releases `(sum_i + z_i) / n_i` with `z_i ~ Lap(r / epsilon_i)`,
//! whose variance is `(n_i sigma2 + 2 r^2 / epsilon_i^2) / n_i^2`. Weighting
//! each release by the reciprocal of that variance minimises the variance of
//! the convex combination.

use crate::error::{empty, invalid, Result};
use crate::mechanisms::{exact_quantile, exp_mech_quantile, DataDomain, LaplaceNoise, PrivacyLevel, RandomStream};

/// Data held by one group of users sharing a privacy requirement.
/// Each user contributes one value.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivacyGroup {
    values: Vec<f64>,
    level: PrivacyLevel,
}

impl PrivacyGroup {
    pub fn new(values: Vec<f64>, level: PrivacyLevel) -> Result<Self> {
        if values.is_empty() {
            return Err(empty("a privacy group needs at least one value"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(invalid("group values must be finite"));
        }
        if let PrivacyLevel::Finite(e) = level {
            PrivacyLevel::finite(e)?;
        }
        Ok(Self { values, level })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self) -> PrivacyLevel {
        self.level
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum after clamping every value into the domain.
    pub fn clamped_sum(&self, domain: &DataDomain) -> f64 {
        self.values.iter().map(|&x| domain.clamp(x)).sum()
    }
}

/// Convex-combination weights, aligned with the group list that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct MixWeights {
    beta: Vec<f64>,
}

impl MixWeights {
    /// Normalises nonnegative raw weights to sum to one.
    pub fn normalize(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(empty("no weights"));
        }
        if raw.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and nonnegative"));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(invalid("weights sum to zero"));
        }
        Ok(Self {
            beta: raw.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

/// A released statistic and, when known in closed form, its variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub theoretical_variance: Option<f64>,
}

/// Variance of one group's private mean: `(n sigma2 + 2 r^2 / eps^2) / n^2`,
/// or `sigma2 / n` for public data.
pub fn group_variance(group: &PrivacyGroup, domain: &DataDomain) -> f64 {
    variance_for(group.n(), group.level(), domain)
}

pub(crate) fn variance_for(n: usize, level: PrivacyLevel, domain: &DataDomain) -> f64 {
    let n = n as f64;
    match level {
        PrivacyLevel::Public => domain.sigma2() / n,
        PrivacyLevel::Finite(eps) => {
            let r = domain.r();
            (n * domain.sigma2() + 2.0 * r * r / (eps * eps)) / (n * n)
        }
    }
}

fn precision(group: &PrivacyGroup, domain: &DataDomain) -> f64 {
    match group.level() {
        PrivacyLevel::Public => group.n() as f64 / domain.sigma2(),
        PrivacyLevel::Finite(_) => 1.0 / group_variance(group, domain),
    }
}

/// Inverse-variance weights `beta_i = (1/Var_i) / sum_j (1/Var_j)`.
pub fn optimal_weights(groups: &[PrivacyGroup], domain: &DataDomain) -> Result<MixWeights> {
    if groups.is_empty() {
        return Err(empty("optimal weights need at least one group"));
    }
    MixWeights::normalize(groups.iter().map(|g| precision(g, domain)).collect())
}

/// `sum_i beta_i^2 Var_i`.
pub fn joint_variance(weights: &MixWeights, groups: &[PrivacyGroup], domain: &DataDomain) -> Result<f64> {
    if weights.len() != groups.len() {
        return Err(invalid(format!(
            "{} weights for {} groups",
            weights.len(),
            groups.len()
        )));
    }
    Ok(weights
        .as_slice()
        .iter()
        .zip(groups)
        .map(|(b, g)| b * b * group_variance(g, domain))
        .sum())
}

fn group_stream(stream: &RandomStream, index: usize) -> RandomStream {
    RandomStream::derive(stream.seed(), &[stream.stream_id(), index as u64])
}

/// Mixed private mean.
///
/// Every private group gets one Laplace draw at its own epsilon from a
/// substream of `stream` keyed by the group index. Groups are disjoint, so
/// each user's data is used once at its own privacy level.
pub fn mixed_mean(groups: &[PrivacyGroup], domain: &DataDomain, stream: &mut RandomStream) -> Result<Estimate> {
    let weights = optimal_weights(groups, domain)?;
    let variance = joint_variance(&weights, groups, domain)?;

    if groups.iter().all(|g| g.level().is_public()) {
        // beta_i proportional to n_i collapses to the pooled mean
        let total: f64 = groups.iter().map(|g| g.clamped_sum(domain)).sum();
        let n: usize = groups.iter().map(PrivacyGroup::n).sum();
        return Ok(Estimate {
            value: total / n as f64,
            theoretical_variance: Some(variance),
        });
    }

    let mut value = 0.0;
    for (i, (g, beta)) in groups.iter().zip(weights.as_slice()).enumerate() {
        let noise = match g.level() {
            PrivacyLevel::Public => 0.0,
            PrivacyLevel::Finite(eps) => {
                LaplaceNoise::calibrated(domain.r(), eps)?.sample(&mut group_stream(stream, i))
            }
        };
        value += beta * (g.clamped_sum(domain) + noise) / g.n() as f64;
    }
    Ok(Estimate {
        value,
        theoretical_variance: Some(variance),
    })
}

/// Mixed private quantile: one exponential-mechanism quantile per private
/// group (exact quantile for public groups), combined with the mean weights.
pub fn mixed_quantile(
    groups: &[PrivacyGroup],
    q: f64,
    domain: &DataDomain,
    stream: &mut RandomStream,
) -> Result<Estimate> {
    let weights = optimal_weights(groups, domain)?;
    let mut value = 0.0;
    for (i, (g, beta)) in groups.iter().zip(weights.as_slice()).enumerate() {
        let local = match g.level() {
            PrivacyLevel::Public => {
                let clamped: Vec<f64> = g.values().iter().map(|&x| domain.clamp(x)).collect();
                exact_quantile(&clamped, q)?
            }
            PrivacyLevel::Finite(eps) => exp_mech_quantile(g.values(), q, eps, domain, &mut group_stream(stream, i))?,
        };
        value += beta * local;
    }
    Ok(Estimate {
        value,
        theoretical_variance: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn domain() -> DataDomain {
        DataDomain::new(-20.0, 20.0, 25.0).unwrap()
    }

    fn group(n: usize, level: PrivacyLevel) -> PrivacyGroup {
        PrivacyGroup::new(vec![0.0; n], level).unwrap()
    }

    fn eps(e: f64) -> PrivacyLevel {
        PrivacyLevel::finite(e).unwrap()
    }

    #[test]
    fn group_variance_values() {
        assert_eq!(group_variance(&group(100, PrivacyLevel::Public), &domain()), 0.25);
        assert!((group_variance(&group(100, eps(0.1)), &domain()) - 8.25).abs() < 1e-12);
        let d = DataDomain::new(-1.0, 1.0, 1.0).unwrap();
        assert!((group_variance(&group(1, eps(1.0)), &d) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_groups() {
        assert!(matches!(
            PrivacyGroup::new(vec![], PrivacyLevel::Public),
            Err(crate::Error::EmptyInput(_))
        ));
        assert!(PrivacyGroup::new(vec![1.0], PrivacyLevel::Finite(-1.0)).is_err());
        assert!(matches!(optimal_weights(&[], &domain()), Err(crate::Error::EmptyInput(_))));
        let mut s = RandomStream::new(0, 0);
        assert!(mixed_mean(&[], &domain(), &mut s).is_err());
        assert!(mixed_quantile(&[], 0.5, &domain(), &mut s).is_err());
    }

    #[test]
    fn weight_examples() {
        let w = optimal_weights(&[group(10, eps(0.3)), group(10, eps(0.3))], &domain()).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 0.5]);

        let w = optimal_weights(&[group(100, PrivacyLevel::Public), group(300, PrivacyLevel::Public)], &domain())
            .unwrap();
        assert!((w.as_slice()[0] - 0.25).abs() < 1e-15);
        assert!((w.as_slice()[1] - 0.75).abs() < 1e-15);

        // raw weights (4, 1/8.25) normalise to (33/34, 1/34)
        let groups = [group(100, PrivacyLevel::Public), group(100, eps(0.1))];
        let w = optimal_weights(&groups, &domain()).unwrap();
        assert!((w.as_slice()[0] - 33.0 / 34.0).abs() < 1e-12);
        assert!((w.as_slice()[1] - 1.0 / 34.0).abs() < 1e-12);
    }

    #[test]
    fn weights_match_grid_search_two_groups() {
        let (v1, v2) = (0.25, 8.25);
        let best = (0..=100_000)
            .map(|i| i as f64 / 100_000.0)
            .min_by(|a, b| {
                let fa = a * a * v1 + (1.0 - a) * (1.0 - a) * v2;
                let fb = b * b * v1 + (1.0 - b) * (1.0 - b) * v2;
                fa.total_cmp(&fb)
            })
            .unwrap();
        let groups = [group(100, PrivacyLevel::Public), group(100, eps(0.1))];
        let w = optimal_weights(&groups, &domain()).unwrap();
        assert!((w.as_slice()[0] - best).abs() < 2e-5);
    }

    #[test]
    fn joint_variance_examples() {
        let groups = [group(100, PrivacyLevel::Public), group(100, eps(0.1))];
        let d = domain();
        let single = joint_variance(&MixWeights::normalize(vec![1.0]).unwrap(), &groups[1..], &d).unwrap();
        assert!((single - 8.25).abs() < 1e-12);

        let opt = joint_variance(&optimal_weights(&groups, &d).unwrap(), &groups, &d).unwrap();
        assert!((opt - 1.0 / (4.0 + 1.0 / 8.25)).abs() < 1e-12);
        assert!((opt - 0.242_647_058_823_529_4).abs() < 1e-12);

        let uniform = joint_variance(&MixWeights::normalize(vec![1.0, 1.0]).unwrap(), &groups, &d).unwrap();
        assert!((uniform - 2.125).abs() < 1e-12);
        assert!(uniform > opt);

        assert!(matches!(
            joint_variance(&MixWeights::normalize(vec![1.0]).unwrap(), &groups, &d),
            Err(crate::Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn public_only_means_are_exact() {
        let d = domain();
        let mut s = RandomStream::new(1, 1);
        let g = PrivacyGroup::new(vec![1.0, 2.0, 3.0], PrivacyLevel::Public).unwrap();
        let est = mixed_mean(std::slice::from_ref(&g), &d, &mut s).unwrap();
        assert_eq!(est.value, 2.0);
        assert!((est.theoretical_variance.unwrap() - 25.0 / 3.0).abs() < 1e-12);

        let groups = vec![
            PrivacyGroup::new(vec![1.0, 2.0], PrivacyLevel::Public).unwrap(),
            PrivacyGroup::new(vec![4.0, 5.0, 6.0, 7.0], PrivacyLevel::Public).unwrap(),
            PrivacyGroup::new(vec![-3.0], PrivacyLevel::Public).unwrap(),
        ];
        let est = mixed_mean(&groups, &d, &mut s).unwrap();
        assert_eq!(est.value, 22.0 / 7.0);
    }

    #[test]
    fn mixed_mean_is_reproducible() {
        let d = domain();
        let groups = vec![group(50, eps(0.5)), group(80, eps(2.0))];
        let a = mixed_mean(&groups, &d, &mut RandomStream::new(5, 9)).unwrap();
        let b = mixed_mean(&groups, &d, &mut RandomStream::new(5, 9)).unwrap();
        let c = mixed_mean(&groups, &d, &mut RandomStream::new(5, 10)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn mixed_mean_is_unbiased() {
        let d = DataDomain::new(-5.0, 5.0, 4.0).unwrap();
        let groups = vec![
            PrivacyGroup::new((0..40).map(|i| (i % 7) as f64 - 2.0).collect(), eps(0.3)).unwrap(),
            PrivacyGroup::new((0..25).map(|i| (i % 5) as f64 * 0.5).collect(), eps(1.5)).unwrap(),
            PrivacyGroup::new(vec![1.0; 10], PrivacyLevel::Public).unwrap(),
        ];
        let w = optimal_weights(&groups, &d).unwrap();
        let truth: f64 = groups
            .iter()
            .zip(w.as_slice())
            .map(|(g, b)| b * g.sum() / g.n() as f64)
            .sum();
        let noise_var: f64 = groups
            .iter()
            .zip(w.as_slice())
            .filter_map(|(g, b)| g.level().epsilon().map(|e| b * b * 2.0 * 25.0 / (e * e) / (g.n() * g.n()) as f64))
            .sum();
        let trials = 100_000;
        let mean = (0..trials)
            .map(|t| mixed_mean(&groups, &d, &mut RandomStream::new(11, t)).unwrap().value)
            .sum::<f64>()
            / trials as f64;
        let se = (noise_var / trials as f64).sqrt();
        assert!((mean - truth).abs() < 4.0 * se, "mean {mean} truth {truth} se {se}");
    }

    #[test]
    fn mixed_quantile_exact_paths() {
        let d = domain();
        let mut s = RandomStream::new(0, 0);
        let g = PrivacyGroup::new(vec![1.0, 2.0, 3.0], PrivacyLevel::Public).unwrap();
        let est = mixed_quantile(std::slice::from_ref(&g), 0.5, &d, &mut s).unwrap();
        assert_eq!(est.value, 2.0);
        assert_eq!(est.theoretical_variance, None);

        let groups = vec![
            PrivacyGroup::new(vec![1.0, 2.0, 3.0], PrivacyLevel::Public).unwrap(),
            PrivacyGroup::new(vec![10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0], PrivacyLevel::Public)
                .unwrap(),
        ];
        let est = mixed_quantile(&groups, 0.5, &d, &mut s).unwrap();
        assert!((est.value - (0.25 * 2.0 + 0.75 * 14.0)).abs() < 1e-12);
    }

    fn arb_groups() -> impl Strategy<Value = Vec<(usize, Option<f64>)>> {
        prop::collection::vec((1usize..5000, prop::option::weighted(0.8, 0.005f64..20.0)), 2..7)
    }

    fn build(shape: &[(usize, Option<f64>)]) -> Vec<PrivacyGroup> {
        shape.iter()
            .map(|&(n, e)| group(n, e.map_or(PrivacyLevel::Public, |e| eps(e))))
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weights_sum_to_one_and_hit_harmonic_bound(shape in arb_groups()) {
            let d = domain();
            let groups = build(&shape);
            let w = optimal_weights(&groups, &d).unwrap();
            let sum: f64 = w.as_slice().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(w.as_slice().iter().all(|b| *b >= 0.0));
            let jv = joint_variance(&w, &groups, &d).unwrap();
            let harmonic = 1.0 / groups.iter().map(|g| 1.0 / group_variance(g, &d)).sum::<f64>();
            prop_assert!(((jv - harmonic) / harmonic).abs() < 1e-9);
        }

        #[test]
        fn perturbing_optimal_weights_increases_variance(shape in arb_groups(), seed in any::<u64>()) {
            let d = domain();
            let groups = build(&shape);
            let w = optimal_weights(&groups, &d).unwrap();
            let best = joint_variance(&w, &groups, &d).unwrap();
            let mut s = RandomStream::new(seed, 0);
            let k = groups.len();
            for _ in 0..100 {
                // zero-sum direction keeps the weights on the simplex plane
                let mut delta: Vec<f64> = (0..k).map(|_| s.uniform() - 0.5).collect();
                let mean = delta.iter().sum::<f64>() / k as f64;
                delta.iter_mut().for_each(|x| *x -= mean);
                let scale = w.as_slice().iter().zip(&delta)
                    .filter(|(_, d)| **d < 0.0)
                    .map(|(b, d)| b / -d)
                    .fold(1.0f64, f64::min) * s.uniform().max(1e-3);
                let moved: Vec<f64> = w.as_slice().iter().zip(&delta).map(|(b, d)| (b + scale * d).max(0.0)).collect();
                let moved_jv: f64 = moved.iter().zip(&groups).map(|(b, g)| b * b * group_variance(g, &d)).sum();
                prop_assert!(moved_jv >= best * (1.0 - 1e-12));
                let quad: f64 = delta.iter().zip(&groups).map(|(x, g)| x * x * group_variance(g, &d)).sum::<f64>() * scale * scale;
                if quad > best * 1e-9 {
                    prop_assert!(moved_jv > best);
                }
            }
        }

        #[test]
        fn normalization_ignores_common_scale(raw in prop::collection::vec(0.001f64..1e3, 1..8), c in 0.001f64..1e3) {
            let a = MixWeights::normalize(raw.clone()).unwrap();
            let b = MixWeights::normalize(raw.iter().map(|x| x * c).collect()).unwrap();
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
