//! Closed-form variance analysis and brute-force reference minimisers.

use crate::baselines::inclusion_probability;
use crate::error::{invalid, Error, Result};
use crate::estimators::PrivacyGroup;
use crate::mechanisms::{amplified_epsilon, DataDomain, PrivacyLevel};

/// Variance as a function of one parameter (a sampling rate `p` or a
/// threshold `t`).
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceCurve {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub variance: Vec<f64>,
}

impl VarianceCurve {
    pub fn new(parameter: impl Into<String>, grid: Vec<f64>, variance: Vec<f64>) -> Result<Self> {
        if grid.len() != variance.len() {
            return Err(invalid("curve grid and values differ in length"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("curve grid must be strictly increasing"));
        }
        if variance.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("curve variances must be finite and nonnegative"));
        }
        Ok(Self {
            parameter: parameter.into(),
            grid,
            variance,
        })
    }

    /// Grid point with the smallest variance (first on ties).
    pub fn argmin(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.variance)
            .fold(None, |best: Option<(f64, f64)>, (&x, &v)| match best {
                Some((_, bv)) if bv <= v => best,
                _ => Some((x, v)),
            })
    }
}

/// Variance of a Laplace mean over an expected `m p` point subsample of `m`
/// private points.
///
/// Without amplification the noise runs at `epsilon / p`, giving
/// `sigma2 / (m p) + 2 r^2 / (epsilon^2 m^2)`. With amplification the
/// (smaller) level `ln(1 + (e^epsilon - 1) / p)` is used instead.
pub fn subsampled_mean_variance(
    m: usize,
    p: f64,
    sigma2: f64,
    r: f64,
    epsilon: f64,
    use_amplification: bool,
) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("sampling rate must lie in (0, 1], got {p}")));
    }
    if m == 0 {
        return Err(invalid("m must be positive"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    let expected = m as f64 * p;
    let effective_eps = if use_amplification {
        amplified_epsilon(epsilon, p)?
    } else {
        epsilon / p
    };
    Ok(sigma2 / expected + 2.0 * r * r / (effective_eps * effective_eps * expected * expected))
}

/// `subsampled_mean_variance` evaluated over a grid of rates.
pub fn subsampling_curve(
    m: usize,
    sigma2: f64,
    r: f64,
    epsilon: f64,
    rates: &[f64],
    use_amplification: bool,
) -> Result<VarianceCurve> {
    let variance = rates
        .iter()
        .map(|&p| subsampled_mean_variance(m, p, sigma2, r, epsilon, use_amplification))
        .collect::<Result<Vec<_>>>()?;
    VarianceCurve::new("p", rates.to_vec(), variance)
}

/// Shape of a group as far as variance formulas care: size and privacy level.
pub(crate) fn shapes(groups: &[PrivacyGroup]) -> Vec<(usize, PrivacyLevel)> {
    groups.iter().map(|g| (g.n(), g.level())).collect()
}

/// Expected-sample-size approximation of the Sample mechanism's variance at
/// threshold `t`: `(N sigma2 + 2 r^2 / t^2) / N^2` with `N = sum_i n_i p_i`.
pub fn predicted_pdp_variance(groups: &[PrivacyGroup], t: f64, domain: &DataDomain) -> Result<f64> {
    predicted_pdp_variance_for(&shapes(groups), t, domain)
}

pub(crate) fn predicted_pdp_variance_for(
    shapes: &[(usize, PrivacyLevel)],
    t: f64,
    domain: &DataDomain,
) -> Result<f64> {
    let mut expected = 0.0;
    for &(n, level) in shapes {
        expected += n as f64 * inclusion_probability(level, t)?;
    }
    if !(expected > 0.0) {
        return Err(invalid(format!("expected sample size is zero at t = {t}")));
    }
    let r = domain.r();
    Ok((expected * domain.sigma2() + 2.0 * r * r / (t * t)) / (expected * expected))
}

/// `predicted_pdp_variance` over a grid of thresholds.
pub fn threshold_curve(groups: &[PrivacyGroup], domain: &DataDomain, thresholds: &[f64]) -> Result<VarianceCurve> {
    let s = shapes(groups);
    let variance = thresholds
        .iter()
        .map(|&t| predicted_pdp_variance_for(&s, t, domain))
        .collect::<Result<Vec<_>>>()?;
    VarianceCurve::new("t", thresholds.to_vec(), variance)
}

/// `points` log-spaced values covering `[lo, hi]` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 || lo >= hi {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    grid
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, c| if c.1 < best.1 { c } else { best })
}

/// Threshold in `[lo, hi]` minimising `predicted_pdp_variance`.
///
/// The objective has kinks wherever `t` crosses a group's epsilon and can be
/// multimodal, so a log grid (plus every epsilon in range) first brackets
/// the global minimum, then golden-section refines it to `tol`.
pub(crate) fn optimal_threshold(
    shapes: &[(usize, PrivacyLevel)],
    domain: &DataDomain,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if lo >= hi {
        return Ok(lo);
    }
    let mut candidates = log_grid(lo, hi, 257);
    candidates.extend(
        shapes
            .iter()
            .filter_map(|(_, l)| l.epsilon())
            .filter(|e| (lo..=hi).contains(e)),
    );
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let objective = |t: f64| predicted_pdp_variance_for(shapes, t, domain).unwrap_or(f64::INFINITY);
    let values: Vec<f64> = candidates.iter().map(|&t| objective(t)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| invalid("empty threshold grid"))?;
    if !values[best].is_finite() {
        return Err(invalid("predicted variance is undefined over the threshold range"));
    }
    let left = candidates[best.saturating_sub(1)];
    let right = candidates[(best + 1).min(candidates.len() - 1)];
    let (t, v) = golden_section_min(objective, left, right, tol);
    Ok(if v < values[best] { t } else { candidates[best] })
}

/// Exhaustive simplex-grid minimisation of `sum_i beta_i^2 Var_i` for two or
/// three groups. Reference oracle for the closed-form weights.
pub fn brute_force_optimal_weights(group_variances: &[f64], grid_resolution: usize) -> Result<Vec<f64>> {
    if !(2..=3).contains(&group_variances.len()) {
        return Err(Error::Unsupported(format!(
            "grid oracle handles 2 or 3 groups, got {}",
            group_variances.len()
        )));
    }
    if grid_resolution < 100 {
        return Err(invalid("grid resolution must be at least 100"));
    }
    if group_variances.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(invalid("group variances must be finite and positive"));
    }
    let res = grid_resolution;
    let h = 1.0 / res as f64;
    let objective = |w: &[f64]| -> f64 { w.iter().zip(group_variances).map(|(b, v)| b * b * v).sum() };

    let mut best = (f64::INFINITY, Vec::new());
    if group_variances.len() == 2 {
        for i in 0..=res {
            let w = [i as f64 * h, (res - i) as f64 * h];
            let f = objective(&w);
            if f < best.0 {
                best = (f, w.to_vec());
            }
        }
    } else {
        for i in 0..=res {
            for j in 0..=(res - i) {
                let w = [i as f64 * h, j as f64 * h, (res - i - j) as f64 * h];
                let f = objective(&w);
                if f < best.0 {
                    best = (f, w.to_vec());
                }
            }
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{group_variance, joint_variance, optimal_weights};

    #[test]
    fn no_subsampling_ignores_amplification_flag() {
        let a = subsampled_mean_variance(1000, 1.0, 25.0, 20.0, 0.1, false).unwrap();
        let b = subsampled_mean_variance(1000, 1.0, 25.0, 20.0, 0.1, true).unwrap();
        let expected = 25.0 / 1000.0 + 2.0 * 400.0 / (0.01 * 1e6);
        assert!((a - expected).abs() < 1e-15);
        assert!((b - expected).abs() < 1e-14);
    }

    #[test]
    fn half_rate_value() {
        let v = subsampled_mean_variance(1000, 0.5, 25.0, 20.0, 0.1, false).unwrap();
        assert!((v - 0.13).abs() < 1e-14);
        assert!(subsampled_mean_variance(1000, 0.5, 25.0, 20.0, 0.1, true).unwrap() > v);
        assert!(subsampled_mean_variance(1000, 0.0, 25.0, 20.0, 0.1, true).is_err());
        assert!(subsampled_mean_variance(1000, 1.5, 25.0, 20.0, 0.1, true).is_err());
    }

    #[test]
    fn p_curve_minimised_at_one() {
        let rates: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        for amp in [false, true] {
            let c = subsampling_curve(500, 4.0, 3.0, 0.7, &rates, amp).unwrap();
            assert_eq!(c.argmin().unwrap().0, 1.0);
        }
    }

    #[test]
    fn predicted_variance_reduces_to_group_variance() {
        let d = DataDomain::new(-20.0, 20.0, 25.0).unwrap();
        let g = PrivacyGroup::new(vec![0.0; 250], PrivacyLevel::finite(0.3).unwrap()).unwrap();
        let p = predicted_pdp_variance(std::slice::from_ref(&g), 0.3, &d).unwrap();
        assert!((p - group_variance(&g, &d)).abs() < 1e-15);
    }

    #[test]
    fn private_term_bound_holds_for_public_private_pair() {
        // the sampled private term at threshold t has variance no smaller
        // than the full private group's Laplace mean at its own epsilon
        let d = DataDomain::new(-20.0, 20.0, 25.0).unwrap();
        let eps = 0.2;
        let private = PrivacyGroup::new(vec![0.0; 400], PrivacyLevel::finite(eps).unwrap()).unwrap();
        let full = group_variance(&private, &d);
        for t in log_grid(0.01, 10.0, 100) {
            let term = predicted_pdp_variance(std::slice::from_ref(&private), t, &d).unwrap();
            assert!(term >= full * (1.0 - 1e-12), "t = {t}");
        }
    }

    #[test]
    fn dominance_two_groups() {
        let d = DataDomain::new(-20.0, 20.0, 25.0).unwrap();
        let eps = 0.5;
        let groups = vec![
            PrivacyGroup::new(vec![0.0; 300], PrivacyLevel::Public).unwrap(),
            PrivacyGroup::new(vec![0.0; 700], PrivacyLevel::finite(eps).unwrap()).unwrap(),
        ];
        let best = joint_variance(&optimal_weights(&groups, &d).unwrap(), &groups, &d).unwrap();
        for t in log_grid(0.01, eps, 200) {
            assert!(predicted_pdp_variance(&groups, t, &d).unwrap() >= best);
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 1.234).powi(2) + 0.5, -3.0, 7.0, 1e-8);
        assert!((x - 1.234).abs() < 1e-7);
        assert!((fx - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(brute_force_optimal_weights(&[1.0, 1.0], 1000).unwrap(), vec![0.5, 0.5]);
        let w = brute_force_optimal_weights(&[0.25, 8.25], 10_000).unwrap();
        assert!((w[0] - 0.970_62).abs() < 1e-3 && (w[1] - 0.029_38).abs() < 1e-3);
        let w = brute_force_optimal_weights(&[1.0, 2.0, 4.0], 300).unwrap();
        for (got, want) in w.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert!((got - want).abs() <= 1.0 / 300.0);
        }
    }

    #[test]
    fn oracle_scope() {
        assert!(matches!(
            brute_force_optimal_weights(&[1.0], 1000),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            brute_force_optimal_weights(&[1.0; 4], 1000),
            Err(Error::Unsupported(_))
        ));
        assert!(brute_force_optimal_weights(&[1.0, 2.0], 10).is_err());
    }

    #[test]
    fn curve_validation() {
        assert!(VarianceCurve::new("t", vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(VarianceCurve::new("t", vec![1.0], vec![f64::NAN]).is_err());
        assert!(VarianceCurve::new("t", vec![1.0, 2.0], vec![1.0]).is_err());
    }
}
