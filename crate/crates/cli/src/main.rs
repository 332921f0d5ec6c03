use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use opcalc::runner::{parse_list, render, run, Format, RunConfig};

/// Run an opcalc experiment suite and write `<out>.csv`, `<out>.json` and
/// `<out>.svg`.
///
/// Experiments: doi-verify, sinc-check, lip-bound, holder-sweep,
/// schatten-decay, ideals-boyd, qc-verify, fuglede-ratio.
///
/// Exit status: 0 when every certified bound and identity holds, 1 when one
/// fails, 2 on usage or runtime errors.
#[derive(Debug, Parser)]
#[command(name = "opcalc", version)]
struct Cli {
    /// Experiment id.
    experiment_id: Option<String>,
    /// JSON file with one run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment id (alternative to the positional argument).
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated matrix dimensions, cycled over trials.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated Schatten exponents; `inf` is accepted.
    #[arg(long)]
    p: Option<String>,
    /// Output path prefix (default: the experiment id).
    #[arg(long)]
    out: Option<String>,
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        None => RunConfig::default(),
    };
    let id = match (&cli.experiment_id, &cli.experiment) {
        (Some(a), Some(b)) if a != b => bail!("conflicting experiment ids `{a}` and `{b}`"),
        (Some(a), _) | (None, Some(a)) => Some(a.clone()),
        (None, None) => None,
    };
    if let Some(id) = id {
        config.experiment = id;
    }
    if config.experiment.is_empty() {
        bail!("no experiment id given");
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dims) = &cli.dims {
        config.dims = Some(parse_list(dims).context("--dims")?);
    }
    if let Some(sigma) = cli.sigma {
        config.sigma = Some(sigma);
    }
    if let Some(trials) = cli.trials {
        config.trials = Some(trials);
    }
    if let Some(alpha) = cli.alpha {
        config.alpha = Some(alpha);
    }
    if let Some(p) = &cli.p {
        config.p = Some(parse_list(p).context("--p")?);
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<bool> {
    let config = build_config(cli)?;
    let report = run(&config).with_context(|| format!("running {}", config.experiment))?;
    let prefix = config.out.clone().unwrap_or_else(|| config.experiment.clone());
    for format in [Format::Csv, Format::Json, Format::Svg] {
        let path = PathBuf::from(format!("{prefix}.{}", format.extension()));
        render(&report, format, &path).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}: {} rows -> {prefix}.{{csv,json,svg}}", report.id, report.rows.len());
    for check in &report.checks {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        println!(
            "  {status} {} ({} checked, {} failed, worst ratio {:.3e})",
            check.name, check.count, check.failures, check.worst_ratio
        );
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("opcalc: {e:#}");
            ExitCode::from(2)
        }
    }
}
