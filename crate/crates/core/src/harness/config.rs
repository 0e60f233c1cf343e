//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! statistic   = mean                 # mean | quantile
//! quantile    = 0.5                  # level q, quantile statistic only
//! group_sizes = 1000, 100, 500
//! epsilons    = 10.0, 0.05, public   # finite > 0, or `public`
//! mu          = 0
//! sigma2      = 25
//! domain      = -20, 20
//! trials      = 1000
//! seed        = 7
//! methods     = mixed, pdp:min, pdp:optimized, pdp:fixed=0.5
//! sweep       = n                    # none | n | low_share
//! sweep_values = 100, 1000, 10000
//! ```
//!
//! Further optional keys: `rmse_reference` (`population` | `sample`),
//! `bootstrap_resamples`, `parallel`, `scenarios` (`eps_high:eps_low` pairs
//! for the median experiment), `p_curve_m`, `p_curve_epsilon`, `p_grid`,
//! `t_grid_points`. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::baselines::ThresholdStrategy;
use crate::error::{Error, Result};
use crate::mechanisms::PrivacyLevel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Statistic {
    Mean,
    Quantile(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Mixed,
    PdpSample(ThresholdStrategy),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Self::Mixed => "mixed".into(),
            Self::PdpSample(s) => format!("pdp:{}", s.label()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "mixed" {
            return Ok(Self::Mixed);
        }
        match s.strip_prefix("pdp:") {
            Some(rest) => Ok(Self::PdpSample(rest.parse()?)),
            None => Err(Error::InvalidParameter(format!("unknown method {s:?}"))),
        }
    }
}

/// Parameter varied across the experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    None,
    /// Size of the first group.
    N(Vec<usize>),
    /// Share of the lower-privacy (larger epsilon) group in a two-group
    /// config; the total size stays `sum(group_sizes)`.
    LowShare(Vec<f64>),
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::N(_) => "n",
            Self::LowShare(_) => "low_share",
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::None => vec![0.0],
            Self::N(v) => v.iter().map(|&n| n as f64).collect(),
            Self::LowShare(v) => v.clone(),
        }
    }
}

/// Reference value for RMSE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RmseReference {
    /// Population statistic of normal(mu, sigma2).
    Population,
    /// The realised statistic of the pooled trial data.
    Sample,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub statistic: Statistic,
    pub group_sizes: Vec<usize>,
    pub epsilons: Vec<PrivacyLevel>,
    pub mu: f64,
    pub sigma2: f64,
    pub domain: (f64, f64),
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub sweep: Sweep,
    pub rmse_reference: RmseReference,
    pub bootstrap_resamples: usize,
    pub parallel: bool,
    pub scenarios: Vec<(f64, f64)>,
    pub p_curve_m: usize,
    pub p_curve_epsilon: f64,
    pub p_grid: Vec<f64>,
    pub t_grid_points: usize,
}

pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 2000;

pub fn default_methods() -> Vec<Method> {
    vec![
        Method::Mixed,
        Method::PdpSample(ThresholdStrategy::Min),
        Method::PdpSample(ThresholdStrategy::Optimized),
        Method::PdpSample(ThresholdStrategy::Average),
        Method::PdpSample(ThresholdStrategy::Max),
    ]
}

/// Default methods restricted to those defined for these privacy levels:
/// Average and Max need every epsilon finite, and any threshold needs one.
fn defaults_for(epsilons: &[PrivacyLevel]) -> Vec<Method> {
    let public = epsilons.iter().filter(|l| l.is_public()).count();
    default_methods()
        .into_iter()
        .filter(|m| match m {
            Method::Mixed => true,
            Method::PdpSample(ThresholdStrategy::Average | ThresholdStrategy::Max) => public == 0,
            Method::PdpSample(_) => public < epsilons.len(),
        })
        .collect()
}

const KEYS: &[&str] = &[
    "statistic",
    "quantile",
    "group_sizes",
    "epsilons",
    "mu",
    "sigma2",
    "domain",
    "trials",
    "seed",
    "methods",
    "sweep",
    "sweep_values",
    "rmse_reference",
    "bootstrap_resamples",
    "parallel",
    "scenarios",
    "p_curve_m",
    "p_curve_epsilon",
    "p_grid",
    "t_grid_points",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected `key = value`, got {line:?}")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(line_no, format!("unknown key {key:?}")));
            }
            if map.insert(key.to_string(), (line_no, value.trim().to_string())).is_some() {
                return Err(err(line_no, format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn scalar<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| err(line, format!("cannot parse {key} value {v:?}"))),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.scalar(key)?
            .ok_or_else(|| err(0, format!("missing required key {key:?}")))
    }

    fn list<T, F>(&self, key: &str, mut item: F) -> Result<Option<Vec<T>>>
    where
        F: FnMut(&str) -> Option<T>,
    {
        let Some((line, v)) = self.get(key) else {
            return Ok(None);
        };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split(',')
            .map(|s| {
                let s = s.trim();
                item(s).ok_or_else(|| err(line, format!("bad {key} entry {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn line_of(&self, key: &str) -> usize {
        self.get(key).map_or(0, |(l, _)| l)
    }
}

impl ExperimentConfig {
    /// Parses and validates a config file body.
    pub fn parse(text: &str) -> Result<Self> {
        let e = Entries::parse(text)?;

        let statistic = match e.get("statistic").map(|(l, v)| (l, v)) {
            None | Some((_, "mean")) => Statistic::Mean,
            Some((_, "quantile")) => Statistic::Quantile(e.scalar("quantile")?.unwrap_or(0.5)),
            Some((l, other)) => return Err(err(l, format!("unknown statistic {other:?}"))),
        };
        if statistic == Statistic::Mean && e.get("quantile").is_some() {
            return Err(err(e.line_of("quantile"), "`quantile` requires statistic = quantile"));
        }

        let group_sizes = e
            .list("group_sizes", |s| s.parse::<usize>().ok())?
            .ok_or_else(|| err(0, "missing required key \"group_sizes\""))?;
        let epsilons = e
            .list("epsilons", |s| s.parse::<PrivacyLevel>().ok())?
            .ok_or_else(|| err(0, "missing required key \"epsilons\""))?;

        let domain = match e.list("domain", |s| s.parse::<f64>().ok())? {
            Some(v) if v.len() == 2 => (v[0], v[1]),
            Some(_) => return Err(err(e.line_of("domain"), "domain needs exactly two bounds `a, b`")),
            None => return Err(err(0, "missing required key \"domain\"")),
        };

        let methods = match e.list("methods", |s| s.parse::<Method>().ok())? {
            Some(m) => m,
            None => defaults_for(&epsilons),
        };

        let sweep_values_line = e.line_of("sweep_values");
        let sweep = match e.get("sweep").map(|(_, v)| v).unwrap_or("none") {
            "none" => Sweep::None,
            "n" => Sweep::N(
                e.list("sweep_values", |s| s.parse::<usize>().ok())?
                    .ok_or_else(|| err(e.line_of("sweep"), "sweep = n needs sweep_values"))?,
            ),
            "low_share" => Sweep::LowShare(
                e.list("sweep_values", |s| s.parse::<f64>().ok())?
                    .ok_or_else(|| err(e.line_of("sweep"), "sweep = low_share needs sweep_values"))?,
            ),
            other => return Err(err(e.line_of("sweep"), format!("unknown sweep {other:?}"))),
        };
        if sweep == Sweep::None && e.get("sweep_values").is_some() {
            return Err(err(sweep_values_line, "sweep_values given without a sweep"));
        }

        let rmse_reference = match e.get("rmse_reference").map(|(l, v)| (l, v)) {
            None | Some((_, "population")) => RmseReference::Population,
            Some((_, "sample")) => RmseReference::Sample,
            Some((l, other)) => return Err(err(l, format!("unknown rmse_reference {other:?}"))),
        };

        let scenarios = e
            .list("scenarios", |s| {
                let (h, l) = s.split_once(':')?;
                Some((h.trim().parse::<f64>().ok()?, l.trim().parse::<f64>().ok()?))
            })?
            .unwrap_or_default();

        let cfg = Self {
            statistic,
            group_sizes,
            epsilons,
            mu: e.scalar("mu")?.unwrap_or(0.0),
            sigma2: e.required("sigma2")?,
            domain,
            trials: e.required("trials")?,
            seed: e.scalar("seed")?.unwrap_or(0),
            methods,
            sweep,
            rmse_reference,
            bootstrap_resamples: e.scalar("bootstrap_resamples")?.unwrap_or(DEFAULT_BOOTSTRAP_RESAMPLES),
            parallel: e.scalar("parallel")?.unwrap_or(true),
            scenarios,
            p_curve_m: e.scalar("p_curve_m")?.unwrap_or(1000),
            p_curve_epsilon: e.scalar("p_curve_epsilon")?.unwrap_or(0.1),
            p_grid: e
                .list("p_grid", |s| s.parse::<f64>().ok())?
                .unwrap_or_else(|| (1..=100).map(|i| i as f64 / 100.0).collect()),
            t_grid_points: e.scalar("t_grid_points")?.unwrap_or(200),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks cross-field invariants. Line numbers are 0 for these errors.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(err(0, m));
        if self.group_sizes.is_empty() {
            return bad("group list is empty".into());
        }
        if self.group_sizes.len() != self.epsilons.len() {
            return bad(format!(
                "{} group sizes but {} epsilons",
                self.group_sizes.len(),
                self.epsilons.len()
            ));
        }
        if self.group_sizes.contains(&0) {
            return bad("group sizes must be at least 1".into());
        }
        if let Statistic::Quantile(q) = self.statistic {
            if !(q > 0.0 && q < 1.0) {
                return bad(format!("quantile must lie in (0, 1), got {q}"));
            }
        }
        let (a, b) = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return bad(format!("domain needs finite a < b, got [{a}, {b}]"));
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return bad(format!("sigma2 must be finite and >= 0, got {}", self.sigma2));
        }
        if !self.mu.is_finite() {
            return bad("mu must be finite".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.bootstrap_resamples == 0 {
            return bad("bootstrap_resamples must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("no methods".into());
        }
        let has_public = self.epsilons.iter().any(PrivacyLevel::is_public);
        let all_public = self.epsilons.iter().all(PrivacyLevel::is_public);
        for m in &self.methods {
            if let Method::PdpSample(s) = m {
                match s {
                    ThresholdStrategy::Max | ThresholdStrategy::Average if has_public => {
                        return bad(format!("{} needs finite epsilons for every group", m.label()));
                    }
                    ThresholdStrategy::Fixed(_) => {}
                    _ if all_public => return bad(format!("{} needs a finite epsilon", m.label())),
                    _ => {}
                }
            }
        }
        match &self.sweep {
            Sweep::None => {}
            Sweep::N(v) => {
                if v.is_empty() || v.contains(&0) {
                    return bad("sweep over n needs positive values".into());
                }
            }
            Sweep::LowShare(v) => {
                if self.group_sizes.len() != 2 {
                    return bad("low_share sweep needs exactly two groups".into());
                }
                if self.group_sizes.iter().sum::<usize>() < 2 {
                    return bad("low_share sweep needs at least two points".into());
                }
                if v.is_empty() || v.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
                    return bad("low_share values must lie in (0, 1)".into());
                }
            }
        }
        for &(h, l) in &self.scenarios {
            PrivacyLevel::finite(h).and(PrivacyLevel::finite(l)).map_err(|e| err(0, e.to_string()))?;
        }
        if self.p_curve_m == 0 || !(self.p_curve_epsilon.is_finite() && self.p_curve_epsilon > 0.0) {
            return bad("p curve needs m >= 1 and finite epsilon > 0".into());
        }
        if self.p_grid.is_empty()
            || self.p_grid.iter().any(|p| !(*p > 0.0 && *p <= 1.0))
            || self.p_grid.windows(2).any(|w| !(w[0] < w[1]))
        {
            return bad("p_grid must be increasing values in (0, 1]".into());
        }
        if self.t_grid_points < 2 {
            return bad("t_grid_points must be at least 2".into());
        }
        Ok(())
    }

    /// Group sizes at one sweep value.
    pub fn sizes_at(&self, sweep_value: f64) -> Vec<usize> {
        let mut sizes = self.group_sizes.clone();
        match self.sweep {
            Sweep::None => {}
            Sweep::N(_) => sizes[0] = sweep_value as usize,
            Sweep::LowShare(_) => {
                let total: usize = sizes.iter().sum();
                let low = self.low_privacy_index();
                let n_low = ((sweep_value * total as f64).round() as usize).clamp(1, total - 1);
                sizes[low] = n_low;
                sizes[1 - low] = total - n_low;
            }
        }
        sizes
    }

    /// Index of the group with the larger epsilon (public counts as largest).
    pub fn low_privacy_index(&self) -> usize {
        let key = |l: &PrivacyLevel| l.epsilon().unwrap_or(f64::INFINITY);
        if key(&self.epsilons[1]) > key(&self.epsilons[0]) {
            1
        } else {
            0
        }
    }

    /// Serialises back to the config syntax.
    pub fn to_config_string(&self) -> String {
        fn join<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
        let mut out = String::new();
        match self.statistic {
            Statistic::Mean => out.push_str("statistic = mean\n"),
            Statistic::Quantile(q) => out.push_str(&format!("statistic = quantile\nquantile = {q}\n")),
        }
        out.push_str(&format!("group_sizes = {}\n", join(&self.group_sizes)));
        out.push_str(&format!("epsilons = {}\n", join(&self.epsilons)));
        out.push_str(&format!("mu = {}\nsigma2 = {}\n", self.mu, self.sigma2));
        out.push_str(&format!("domain = {}, {}\n", self.domain.0, self.domain.1));
        out.push_str(&format!("trials = {}\nseed = {}\n", self.trials, self.seed));
        out.push_str(&format!("methods = {}\n", join(&self.methods)));
        out.push_str(&format!("sweep = {}\n", self.sweep.name()));
        match &self.sweep {
            Sweep::None => {}
            Sweep::N(v) => out.push_str(&format!("sweep_values = {}\n", join(v))),
            Sweep::LowShare(v) => out.push_str(&format!("sweep_values = {}\n", join(v))),
        }
        let reference = match self.rmse_reference {
            RmseReference::Population => "population",
            RmseReference::Sample => "sample",
        };
        out.push_str(&format!("rmse_reference = {reference}\n"));
        out.push_str(&format!("bootstrap_resamples = {}\n", self.bootstrap_resamples));
        out.push_str(&format!("parallel = {}\n", self.parallel));
        if !self.scenarios.is_empty() {
            let s: Vec<String> = self.scenarios.iter().map(|(h, l)| format!("{h}:{l}")).collect();
            out.push_str(&format!("scenarios = {}\n", s.join(", ")));
        }
        out.push_str(&format!(
            "p_curve_m = {}\np_curve_epsilon = {}\np_grid = {}\nt_grid_points = {}\n",
            self.p_curve_m,
            self.p_curve_epsilon,
            join(&self.p_grid),
            self.t_grid_points
        ));
        out
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MEAN_SWEEP: &str = "
        # mean experiment
        statistic = mean
        group_sizes = 1000, 100, 500, 1000, 5000, 10000
        epsilons = 10.0, 0.05, 0.1, 0.01, 0.25, 0.15
        mu = 0
        sigma2 = 25
        domain = -20, 20
        trials = 1000
        seed = 11
        sweep = n
        sweep_values = 100, 1000, 10000
    ";

    #[test]
    fn parses_mean_sweep_config() {
        let c = ExperimentConfig::parse(MEAN_SWEEP).unwrap();
        assert_eq!(c.group_sizes, vec![1000, 100, 500, 1000, 5000, 10000]);
        assert_eq!(c.epsilons[3], PrivacyLevel::Finite(0.01));
        assert_eq!(c.methods, default_methods());
        assert_eq!(c.sweep, Sweep::N(vec![100, 1000, 10000]));
        assert_eq!(c.sizes_at(100.0)[0], 100);
        assert_eq!(c.bootstrap_resamples, 2000);
        assert_eq!(c.rmse_reference, RmseReference::Population);
    }

    #[test]
    fn low_share_sizes() {
        let c = ExperimentConfig::parse(
            "statistic = quantile\ngroup_sizes = 500, 501\nepsilons = 0.1, 1.0\nsigma2 = 1\n\
             domain = -4, 4\ntrials = 5\nsweep = low_share\nsweep_values = 0.1, 0.5\n\
             methods = mixed, pdp:average",
        )
        .unwrap();
        assert_eq!(c.statistic, Statistic::Quantile(0.5));
        assert_eq!(c.low_privacy_index(), 1);
        assert_eq!(c.sizes_at(0.1), vec![901, 100]);
        assert_eq!(c.sizes_at(0.5).iter().sum::<usize>(), 1001);
    }

    fn line_of(text: &str) -> usize {
        match ExperimentConfig::parse(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let base = "sigma2 = 1\ngroup_sizes = 3\nepsilons = 1\ndomain = 0, 1\ntrials = 2\n";
        assert!(ExperimentConfig::parse(base).is_ok());
        assert_eq!(line_of(&format!("{base}bogus = 3\n")), 6);
        assert_eq!(line_of(&format!("{base}sigma2 = 2\n")), 6);
        assert_eq!(line_of(&base.replace("sigma2 = 1", "sigma2 = x")), 1);
        assert_eq!(line_of(&format!("{base}just words\n")), 6);
        assert_eq!(line_of(&base.replace("group_sizes = 3", "group_sizes = 1, two")), 2);
        assert_eq!(line_of("sigma2 = 1\n"), 0);
    }

    #[test]
    fn validation_failures() {
        let base = MEAN_SWEEP.replace("sweep = n", "sweep = none").replace("sweep_values = 100, 1000, 10000", "");
        assert!(ExperimentConfig::parse(&base).is_ok());
        for (from, to) in [
            ("group_sizes = 1000, 100, 500, 1000, 5000, 10000", "group_sizes ="),
            ("epsilons = 10.0, 0.05, 0.1, 0.01, 0.25, 0.15", "epsilons = 10.0"),
            ("domain = -20, 20", "domain = 20, -20"),
            ("trials = 1000", "trials = 0"),
            ("statistic = mean", "statistic = quantile\nquantile = 1.5"),
            ("statistic = mean", "statistic = median"),
            ("epsilons = 10.0", "methods = mixed, pdp:max\n        epsilons = public"),
        ] {
            let text = base.replace(from, to);
            assert!(
                matches!(ExperimentConfig::parse(&text), Err(Error::Config { .. })),
                "{from} -> {to} should fail"
            );
        }
    }

    #[test]
    fn default_methods_respect_public_groups() {
        let c = ExperimentConfig::parse("group_sizes = 3, 4\nepsilons = public, 0.1\nsigma2 = 1\ndomain = 0, 1\ntrials = 1\n")
            .unwrap();
        assert_eq!(
            c.methods,
            vec![
                Method::Mixed,
                Method::PdpSample(ThresholdStrategy::Min),
                Method::PdpSample(ThresholdStrategy::Optimized)
            ]
        );
        let c = ExperimentConfig::parse("group_sizes = 3\nepsilons = public\nsigma2 = 1\ndomain = 0, 1\ntrials = 1\n").unwrap();
        assert_eq!(c.methods, vec![Method::Mixed]);
    }

    #[test]
    fn methods_parse() {
        assert_eq!("mixed".parse::<Method>().unwrap(), Method::Mixed);
        assert_eq!(
            "pdp:fixed=0.5".parse::<Method>().unwrap(),
            Method::PdpSample(ThresholdStrategy::Fixed(0.5))
        );
        assert!("pdp".parse::<Method>().is_err());
        assert!("pdp:nope".parse::<Method>().is_err());
    }

    fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
        (
            prop::collection::vec((1usize..20_000, prop::option::weighted(0.9, 0.001f64..50.0)), 1..6),
            -10.0f64..10.0,
            0.0f64..100.0,
            1usize..5000,
            any::<u64>(),
            prop::bool::ANY,
        )
            .prop_map(|(groups, mu, sigma2, trials, seed, quantile)| {
                let all_finite = groups.iter().all(|(_, e)| e.is_some());
                let mut methods = vec![Method::Mixed, Method::PdpSample(ThresholdStrategy::Fixed(0.3))];
                if all_finite {
                    methods.push(Method::PdpSample(ThresholdStrategy::Max));
                }
                ExperimentConfig {
                    statistic: if quantile { Statistic::Quantile(0.25) } else { Statistic::Mean },
                    group_sizes: groups.iter().map(|g| g.0).collect(),
                    epsilons: groups
                        .iter()
                        .map(|g| g.1.map_or(PrivacyLevel::Public, PrivacyLevel::Finite))
                        .collect(),
                    mu,
                    sigma2,
                    domain: (mu - 1.5, mu + 2.25),
                    trials,
                    seed,
                    methods,
                    sweep: Sweep::N(vec![3, 30]),
                    rmse_reference: RmseReference::Sample,
                    bootstrap_resamples: 100,
                    parallel: false,
                    scenarios: vec![(0.1, 1.0)],
                    p_curve_m: 10,
                    p_curve_epsilon: 0.5,
                    p_grid: vec![0.5, 1.0],
                    t_grid_points: 10,
                }
            })
    }

    proptest! {
        #[test]
        fn config_text_round_trips(cfg in arb_config()) {
            let text = cfg.to_config_string();
            prop_assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,200}") {
            let _ = ExperimentConfig::parse(&text);
        }
    }
}
