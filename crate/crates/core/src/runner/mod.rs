//! Run configuration, experiment dispatch and output rendering.

mod svg;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bandlimited::TrigPolynomial;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::perturbation::{
    default_delta_grid, doi_verify, experiment_fuglede_ratio, experiment_holder_sweep, experiment_quasicommutator,
    experiment_schatten_decay, ideals_boyd, lip_bound, run_function, sinc_check, surrogate_octaves, ExperimentReport,
    TrialPlan,
};

pub use svg::render_svg;

pub const MAX_DIM: usize = 64;
pub const MAX_TRIALS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    DoiVerify,
    SincCheck,
    LipBound,
    HolderSweep,
    SchattenDecay,
    IdealsBoyd,
    QcVerify,
    FugledeRatio,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::DoiVerify,
        ExperimentId::SincCheck,
        ExperimentId::LipBound,
        ExperimentId::HolderSweep,
        ExperimentId::SchattenDecay,
        ExperimentId::IdealsBoyd,
        ExperimentId::QcVerify,
        ExperimentId::FugledeRatio,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::DoiVerify => "doi-verify",
            ExperimentId::SincCheck => "sinc-check",
            ExperimentId::LipBound => "lip-bound",
            ExperimentId::HolderSweep => "holder-sweep",
            ExperimentId::SchattenDecay => "schatten-decay",
            ExperimentId::IdealsBoyd => "ideals-boyd",
            ExperimentId::QcVerify => "qc-verify",
            ExperimentId::FugledeRatio => "fuglede-ratio",
        }
    }

    fn defaults(self) -> Defaults {
        let span: Vec<usize> = (2..=8).collect();
        let (dims, sigma, trials) = match self {
            ExperimentId::DoiVerify => (span, 8.0, 200),
            ExperimentId::SincCheck => (vec![4], 4.0, 50),
            ExperimentId::LipBound => (vec![2, 4, 8], 8.0, 500),
            ExperimentId::HolderSweep => (vec![4], 512.0, 20),
            ExperimentId::SchattenDecay => (vec![4], 512.0, 50),
            ExperimentId::IdealsBoyd => (vec![8], 1.0, 10_000),
            ExperimentId::QcVerify => (span, 8.0, 200),
            ExperimentId::FugledeRatio => (vec![2], 1.0, 100),
        };
        let p = match self {
            ExperimentId::SchattenDecay => vec![1.0],
            ExperimentId::IdealsBoyd => vec![1.0, 4.0 / 3.0, 2.0, 4.0],
            ExperimentId::FugledeRatio => vec![1.0, 2.0, f64::INFINITY],
            _ => Vec::new(),
        };
        Defaults { dims, sigma, trials, p }
    }
}

struct Defaults {
    dims: Vec<usize>,
    sigma: f64,
    trials: usize,
    p: Vec<f64>,
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// One run, as read from a JSON object. Absent fields take per-experiment
/// defaults; `p` accepts a number, a list, and `"inf"`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_exponents",
        deserialize_with = "de_exponents"
    )]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Exponents {
    One(Exponent),
    Many(Vec<Exponent>),
}

fn exponent_value(e: Exponent) -> std::result::Result<f64, String> {
    match e {
        Exponent::Number(v) => Ok(v),
        Exponent::Text(s) => s.parse::<f64>().map_err(|_| format!("invalid exponent `{s}`")),
    }
}

fn de_exponents<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<f64>>, D::Error> {
    let raw = Option::<Exponents>::deserialize(d)?;
    let list = match raw {
        None => return Ok(None),
        Some(Exponents::One(e)) => vec![e],
        Some(Exponents::Many(v)) => v,
    };
    list.into_iter()
        .map(exponent_value)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Some)
        .map_err(serde::de::Error::custom)
}

fn ser_exponents<S: Serializer>(p: &Option<Vec<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let list: Option<Vec<Exponent>> = p.as_ref().map(|v| {
        v.iter()
            .map(|x| if x.is_finite() { Exponent::Number(*x) } else { Exponent::Text(format!("{x}")) })
            .collect()
    });
    list.serialize(s)
}

/// Parses `"1,2,inf"`-style lists.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
        .collect()
}

/// Configuration with defaults filled in and ranges checked.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub sigma: f64,
    pub trials: usize,
    pub alpha: f64,
    pub p: Vec<f64>,
    pub delta_grid: Vec<f64>,
}

impl RunConfig {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let experiment: ExperimentId = self.experiment.parse()?;
        let d = experiment.defaults();
        let dims = self.dims.clone().unwrap_or(d.dims);
        if dims.is_empty() || dims.iter().any(|&n| n == 0 || n > MAX_DIM) {
            return Err(Error::OutOfRange(format!("dims must be a nonempty list within 1..={MAX_DIM}, got {dims:?}")));
        }
        let trials = self.trials.unwrap_or(d.trials);
        if trials > MAX_TRIALS {
            return Err(Error::OutOfRange(format!("trials must be at most {MAX_TRIALS}, got {trials}")));
        }
        let sigma = self.sigma.unwrap_or(d.sigma);
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::OutOfRange(format!("sigma must be positive and finite, got {sigma}")));
        }
        let alpha = self.alpha.unwrap_or(0.5);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRange(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let p = self.p.clone().unwrap_or(d.p);
        if p.iter().any(|x| !(*x >= 1.0)) {
            return Err(Error::OutOfRange(format!("p values must be at least 1, got {p:?}")));
        }
        if experiment == ExperimentId::SchattenDecay && p.len() != 1 {
            return Err(Error::OutOfRange("schatten-decay takes a single p".into()));
        }
        if matches!(experiment, ExperimentId::SchattenDecay | ExperimentId::IdealsBoyd) && p.iter().any(|x| x.is_infinite()) {
            return Err(Error::OutOfRange(format!("{experiment} needs finite p")));
        }
        let delta_grid = self.delta_grid.clone().unwrap_or_else(default_delta_grid);
        if delta_grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::OutOfRange("delta_grid entries must be positive and finite".into()));
        }
        Ok(ResolvedConfig { experiment, seed: self.seed, dims, sigma, trials, alpha, p, delta_grid })
    }
}

impl ResolvedConfig {
    /// Canonical JSON of every parameter the run depends on.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("experiment".into(), self.experiment.as_str().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("dims".into(), self.dims.clone().into());
        m.insert("sigma".into(), self.sigma.into());
        m.insert("trials".into(), self.trials.into());
        m.insert("alpha".into(), self.alpha.into());
        m.insert(
            "p".into(),
            self.p.iter().map(|x| crate::perturbation::float_json(*x)).collect::<Vec<_>>().into(),
        );
        m.insert("delta_grid".into(), self.delta_grid.clone().into());
        serde_json::Value::Object(m)
    }
}

pub fn run(config: &RunConfig) -> Result<ExperimentReport> {
    run_with(config, Execution::default())
}

/// [`run`] with an explicit execution mode; outputs do not depend on it.
pub fn run_with(config: &RunConfig, exec: Execution) -> Result<ExperimentReport> {
    let c = config.resolve()?;
    let plan = TrialPlan::new(c.dims.clone(), c.trials, c.seed)?.with_exec(exec);
    let mut report = match c.experiment {
        ExperimentId::DoiVerify => doi_verify(&plan, c.sigma),
        ExperimentId::SincCheck => sinc_check(&plan, c.sigma),
        ExperimentId::LipBound => lip_bound(&run_function(c.seed, c.sigma), &plan),
        ExperimentId::HolderSweep => {
            let f = TrigPolynomial::weierstrass(c.alpha, surrogate_octaves(c.sigma));
            experiment_holder_sweep(&f, c.alpha, &c.delta_grid, &plan)
        }
        ExperimentId::SchattenDecay => {
            let f = TrigPolynomial::weierstrass(c.alpha, surrogate_octaves(c.sigma));
            experiment_schatten_decay(&f, c.alpha, c.p[0], &plan)
        }
        ExperimentId::IdealsBoyd => ideals_boyd(&c.p, &plan),
        ExperimentId::QcVerify => experiment_quasicommutator(&run_function(c.seed, c.sigma), &plan),
        ExperimentId::FugledeRatio => experiment_fuglede_ratio(&c.p, &plan),
    }
    .map_err(|e| Error::invalid(format!("{}: {e}", c.experiment)))?;
    report.meta("config", c.to_json_value());
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

pub fn render_string(report: &ExperimentReport, format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(report.to_csv()),
        Format::Json => Ok(report.to_json()),
        Format::Svg => render_svg(report),
    }
}

pub fn render(report: &ExperimentReport, format: Format, path: &Path) -> Result<()> {
    let text = render_string(report, format)?;
    std::fs::write(path, text)?;
    Ok(())
}
