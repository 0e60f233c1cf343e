//! `hetdp`: run the mean and median experiments, emit variance curves, and
//! print mixing weights.
//!
//! Exit codes: 0 on success, 2 for config or parameter errors, 3 for I/O
//! failures while writing results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hetdp::analysis::{log_grid, subsampling_curve, threshold_curve};
use hetdp::estimators::{group_variance, joint_variance, optimal_weights};
use hetdp::harness::{format_float, metadata, resolved_thresholds, run_experiment, to_csv, ExperimentConfig, Statistic, TrialStats};
use hetdp::{DataDomain, PrivacyGroup, PrivacyLevel};

const OUT_DIR_ENV: &str = "HETDP_OUT_DIR";
const CURVES_HEADER: &str = "curve,parameter,value,variance";

#[derive(Parser, Debug)]
#[command(name = "hetdp", about = "Private means and medians under heterogeneous privacy budgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Variance of the mixed and Sample-mechanism means across a sweep.
    MeanExperiment(Common),
    /// RMSE of the mixed and Sample-mechanism medians per scenario.
    MedianExperiment(Common),
    /// Subsampling and threshold variance curves.
    VarianceCurves(Common),
    /// Per-group variances and mixing weights.
    Weights(Common),
    /// Print the version.
    Version,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to `<subcommand>.csv` under $HETDP_OUT_DIR or `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<hetdp::Error> for CliError {
    fn from(e: hetdp::Error) -> Self {
        Self::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn load(common: &Common) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_path(common: &Common, name: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
        dir.join(format!("{name}.csv"))
    })
}

fn write(path: &Path, body: &str) -> CliResult<()> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn meta_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

fn summarize(rows: &[TrialStats]) {
    for r in rows {
        println!(
            "{:<40} {}={:<8} var={:.4e} rmse={:.4e} failures={}",
            r.method, r.sweep_param, r.sweep_value, r.emp_variance, r.rmse, r.failures
        );
    }
}

fn mean_experiment(common: &Common) -> CliResult<()> {
    let cfg = load(common)?;
    if cfg.statistic != Statistic::Mean {
        return Err(CliError::Config("mean-experiment needs statistic = mean".into()));
    }
    let rows = run_experiment(&cfg)?;
    let mut meta = metadata(&cfg);
    for (method, value, t) in resolved_thresholds(&cfg)? {
        let _ = writeln!(meta, "threshold {method} {}={value} t={t}", cfg.sweep.name());
    }
    let path = output_path(common, "mean-experiment");
    write(&path, &to_csv(&rows))?;
    write(&meta_path(&path), &meta)?;
    summarize(&rows);
    Ok(())
}

const DEFAULT_SCENARIOS: [(f64, f64); 2] = [(0.1, 1.0), (0.01, 10.0)];

fn median_experiment(common: &Common) -> CliResult<()> {
    let cfg = load(common)?;
    if !matches!(cfg.statistic, Statistic::Quantile(_)) {
        return Err(CliError::Config("median-experiment needs statistic = quantile".into()));
    }
    if cfg.group_sizes.len() != 2 {
        return Err(CliError::Config("median-experiment needs exactly two groups (high, low privacy)".into()));
    }
    let scenarios = if cfg.scenarios.is_empty() {
        DEFAULT_SCENARIOS.to_vec()
    } else {
        cfg.scenarios.clone()
    };
    let mut rows = Vec::new();
    let mut meta = metadata(&cfg);
    for (high, low) in scenarios {
        let mut scenario = cfg.clone();
        scenario.epsilons = vec![PrivacyLevel::finite(high)?, PrivacyLevel::finite(low)?];
        scenario.validate()?;
        let tag = format!("eps_h={high};eps_l={low}");
        let _ = writeln!(meta, "scenario = {tag}");
        for mut r in run_experiment(&scenario)? {
            r.method = format!("{}|{tag}", r.method);
            rows.push(r);
        }
    }
    let path = output_path(common, "median-experiment");
    write(&path, &to_csv(&rows))?;
    write(&meta_path(&path), &meta)?;
    summarize(&rows);
    Ok(())
}

fn placeholder_groups(cfg: &ExperimentConfig) -> CliResult<Vec<PrivacyGroup>> {
    cfg.group_sizes
        .iter()
        .zip(&cfg.epsilons)
        .map(|(&n, &l)| PrivacyGroup::new(vec![0.0; n], l).map_err(CliError::from))
        .collect()
}

fn domain_of(cfg: &ExperimentConfig) -> CliResult<DataDomain> {
    Ok(DataDomain::new(cfg.domain.0, cfg.domain.1, cfg.sigma2)?)
}

fn variance_curves(common: &Common) -> CliResult<()> {
    let cfg = load(common)?;
    let domain = domain_of(&cfg)?;
    let groups = placeholder_groups(&cfg)?;
    let finite: Vec<f64> = cfg.epsilons.iter().filter_map(PrivacyLevel::epsilon).collect();
    if finite.is_empty() {
        return Err(CliError::Config("threshold curve needs at least one finite epsilon".into()));
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let p_plain = subsampling_curve(cfg.p_curve_m, cfg.sigma2, domain.r(), cfg.p_curve_epsilon, &cfg.p_grid, false)?;
    let p_amp = subsampling_curve(cfg.p_curve_m, cfg.sigma2, domain.r(), cfg.p_curve_epsilon, &cfg.p_grid, true)?;
    let t_curve = threshold_curve(&groups, &domain, &log_grid(lo, hi, cfg.t_grid_points))?;
    let mixed = joint_variance(&optimal_weights(&groups, &domain)?, &groups, &domain)?;

    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for (name, curve) in [("subsampling", &p_plain), ("subsampling_amplified", &p_amp), ("pdp_threshold", &t_curve)] {
        for (x, v) in curve.grid.iter().zip(&curve.variance) {
            let _ = writeln!(out, "{name},{},{},{}", curve.parameter, format_float(*x), format_float(*v));
        }
    }
    for x in &t_curve.grid {
        let _ = writeln!(out, "mixed_reference,t,{},{}", format_float(*x), format_float(mixed));
    }
    let path = output_path(common, "variance-curves");
    write(&path, &out)?;

    for (name, curve) in [("subsampling", &p_plain), ("subsampling_amplified", &p_amp), ("pdp_threshold", &t_curve)] {
        if let Some((x, v)) = curve.argmin() {
            println!("{name}: argmin {}={x} variance={v:.6e}", curve.parameter);
        }
    }
    println!("mixed_reference: variance={mixed:.6e}");
    Ok(())
}

fn weights(common: &Common) -> CliResult<()> {
    let cfg = load(common)?;
    let domain = domain_of(&cfg)?;
    let groups = placeholder_groups(&cfg)?;
    let w = optimal_weights(&groups, &domain)?;
    println!("{:>5} {:>8} {:>10} {:>14} {:>14} {:>10}", "group", "n", "epsilon", "variance", "raw_weight", "weight");
    for (i, (g, beta)) in groups.iter().zip(w.as_slice()).enumerate() {
        let var = group_variance(g, &domain);
        println!(
            "{:>5} {:>8} {:>10} {:>14.6e} {:>14.6e} {:>10.5}",
            i,
            g.n(),
            g.level().to_string(),
            var,
            1.0 / var,
            beta
        );
    }
    println!("joint_variance {:.6e}", joint_variance(&w, &groups, &domain)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::MeanExperiment(c) => mean_experiment(c),
        Command::MedianExperiment(c) => median_experiment(c),
        Command::VarianceCurves(c) => variance_curves(c),
        Command::Weights(c) => weights(c),
        Command::Version => {
            println!("hetdp {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("io error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
