//! Run configuration: a TOML file with command-line overrides on top.
//!
//! Top-level keys are flat (`input = "..."`, `seed = 7`, ...); base kernels
//! are `[[kernel]]` tables with `kind`, `variance`, `lengthscale`, `nu`,
//! `beta` and an optional `weight`.

use std::path::{Component, Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::Args;
use serde::Deserialize;

use ensemble_gp_core::bayesopt::{AcquisitionConfig, ScoreKind, DEFAULT_CANDIDATE_COUNT, DEFAULT_XI};
use ensemble_gp_core::data::{AtcCode, ColumnMap, Frequency, SampleCount, SeriesFormat, SplitConfig, SplitMode};
use ensemble_gp_core::gp::DEFAULT_NOISE_VARIANCE;
use ensemble_gp_core::kernels::Smoothness;
use ensemble_gp_core::BaseKernel64;

pub const DEFAULT_ITERATIONS: usize = 25;
pub const DEFAULT_OUT_DIR: &str = "out";

/// Flags shared by every subcommand. Anything set here beats the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct SharedArgs {
    /// TOML run configuration
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Transactions CSV (ingest) or series CSV (other commands)
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Brand to ATC code mapping CSV
    #[arg(long, value_name = "PATH")]
    pub mapping: Option<PathBuf>,
    /// Series layout: long (timestamp,quantity) or wide (one column per code)
    #[arg(long, value_name = "long|wide")]
    pub format: Option<String>,
    #[arg(long, value_name = "CODE")]
    pub atc: Option<String>,
    #[arg(long, value_name = "daily|weekly|monthly")]
    pub freq: Option<String>,
    /// Number of time points to subsample, or `all`
    #[arg(long, value_name = "N|all")]
    pub samples: Option<String>,
    #[arg(long, value_name = "F")]
    pub train_frac: Option<f64>,
    #[arg(long, value_name = "F")]
    pub val_frac: Option<f64>,
    /// How points are assigned to train/validation/test
    #[arg(long, value_name = "chronological|random")]
    pub split: Option<String>,
    /// Observation noise variance in standardized units
    #[arg(long, value_name = "V")]
    pub noise: Option<f64>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Bayesian-optimization flags (`optimize`, and `evaluate`/`forecast` when
/// no weights are configured).
#[derive(Debug, Clone, Default, Args)]
pub struct BoArgs {
    #[arg(long, value_name = "N")]
    pub iterations: Option<usize>,
    #[arg(long, value_name = "F")]
    pub xi: Option<f64>,
    #[arg(long, value_name = "N")]
    pub candidates: Option<usize>,
    #[arg(long, value_name = "true|false", action = clap::ArgAction::Set)]
    pub simplex: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    mapping: Option<PathBuf>,
    format: Option<String>,
    atc: Option<String>,
    freq: Option<String>,
    samples: Option<Samples>,
    train_frac: Option<f64>,
    val_frac: Option<f64>,
    split: Option<String>,
    noise: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    iterations: Option<usize>,
    xi: Option<f64>,
    candidates: Option<usize>,
    simplex: Option<bool>,
    score: Option<String>,
    horizon: Option<usize>,
    columns: Option<FileColumns>,
    #[serde(default)]
    kernel: Vec<FileKernel>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Samples {
    Count(u64),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileColumns {
    date: Option<String>,
    time: Option<String>,
    brand: Option<String>,
    quantity: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileKernel {
    kind: String,
    variance: Option<f64>,
    lengthscale: Option<f64>,
    nu: Option<f64>,
    beta: Option<f64>,
    weight: Option<f64>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub format: SeriesFormat,
    pub atc: Option<AtcCode>,
    pub frequency: Frequency,
    pub split: SplitConfig,
    pub kernels: Vec<BaseKernel64>,
    /// Fixed ensemble weights; `None` means "optimize them".
    pub weights: Option<Vec<f64>>,
    pub noise_variance: f64,
    pub iterations: usize,
    pub acquisition: AcquisitionConfig<f64>,
    pub simplex: bool,
    pub score: ScoreKind,
    pub horizon: Option<usize>,
    pub columns: ColumnMap,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(shared: &SharedArgs, bo: &BoArgs) -> Result<Self> {
        let (file, base) = match &shared.config {
            Some(p) => {
                let text =
                    std::fs::read_to_string(p).with_context(|| format!("cannot read config file {}", p.display()))?;
                let file: FileConfig =
                    toml::from_str(&text).with_context(|| format!("invalid config file {}", p.display()))?;
                (file, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        // paths in the config file are relative to the file itself
        let from_file = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));

        let input = shared.input.clone().or_else(|| from_file(&file.input));
        let mapping = shared.mapping.clone().or_else(|| from_file(&file.mapping));
        let out = shared
            .out
            .clone()
            .or_else(|| from_file(&file.out))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

        let format = match shared.format.as_deref().or(file.format.as_deref()) {
            Some(s) => s.parse()?,
            None => SeriesFormat::Long,
        };
        let atc = shared
            .atc
            .as_deref()
            .or(file.atc.as_deref())
            .map(str::parse)
            .transpose()?;
        let frequency = match shared.freq.as_deref().or(file.freq.as_deref()) {
            Some(s) => s.parse()?,
            None => Frequency::default(),
        };
        let sample_count = match (&shared.samples, &file.samples) {
            (Some(s), _) | (None, Some(Samples::Text(s))) => s.parse()?,
            (None, Some(Samples::Count(n))) => format!("{n}").parse()?,
            (None, None) => SampleCount::All,
        };
        let defaults = SplitConfig::default();
        let split = SplitConfig {
            sample_count,
            mode: match shared.split.as_deref().or(file.split.as_deref()) {
                Some(s) => s.parse()?,
                None => SplitMode::default(),
            },
            train_fraction: shared.train_frac.or(file.train_frac).unwrap_or(defaults.train_fraction),
            validation_fraction: shared
                .val_frac
                .or(file.val_frac)
                .unwrap_or(defaults.validation_fraction),
            seed: shared.seed.or(file.seed).unwrap_or(defaults.seed),
        };

        let (kernels, weights) = resolve_kernels(&file.kernel)?;
        let noise_variance = shared.noise.or(file.noise).unwrap_or(DEFAULT_NOISE_VARIANCE);
        ensure!(
            noise_variance.is_finite() && noise_variance >= 0.0,
            "noise variance must be finite and >= 0 (got {noise_variance})"
        );
        let xi = bo.xi.or(file.xi).unwrap_or(DEFAULT_XI);
        ensure!(xi.is_finite() && xi >= 0.0, "xi must be finite and >= 0 (got {xi})");
        let candidate_count = bo.candidates.or(file.candidates).unwrap_or(DEFAULT_CANDIDATE_COUNT);
        ensure!(candidate_count > 0, "candidate count must be positive");
        let score = match file.score.as_deref() {
            None | Some("neg_rmse") => ScoreKind::NegativeRmse,
            Some("log_marginal_likelihood") => ScoreKind::LogMarginalLikelihood,
            Some(s) => bail!("score must be neg_rmse or log_marginal_likelihood (got `{s}`)"),
        };

        let mut columns = ColumnMap::default();
        if let Some(c) = file.columns {
            if let Some(v) = c.date {
                columns.date = v;
            }
            if c.time.is_some() {
                columns.time = c.time;
            }
            if let Some(v) = c.brand {
                columns.brand = v;
            }
            if let Some(v) = c.quantity {
                columns.quantity = v;
            }
        }

        let cfg = Self {
            input,
            mapping,
            format,
            atc,
            frequency,
            split,
            kernels,
            weights,
            noise_variance,
            iterations: bo.iterations.or(file.iterations).unwrap_or(DEFAULT_ITERATIONS),
            acquisition: AcquisitionConfig { xi, candidate_count },
            simplex: bo.simplex.or(file.simplex).unwrap_or(true),
            score,
            horizon: file.horizon,
            columns,
            out,
        };
        cfg.check_distinct_paths()?;
        Ok(cfg)
    }

    fn check_distinct_paths(&self) -> Result<()> {
        let named: Vec<(&str, PathBuf)> = [
            ("input", self.input.as_deref()),
            ("mapping", self.mapping.as_deref()),
            ("out", Some(self.out.as_path())),
        ]
        .into_iter()
        .filter_map(|(n, p)| p.map(|p| (n, normalize(p))))
        .collect();
        for (i, (a, pa)) in named.iter().enumerate() {
            for (b, pb) in &named[i + 1..] {
                ensure!(pa != pb, "{a} and {b} refer to the same path {}", pa.display());
            }
        }
        Ok(())
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| anyhow!("no input path given (--input or `input` in the config)"))
    }

    pub fn require_mapping(&self) -> Result<&Path> {
        self.mapping
            .as_deref()
            .ok_or_else(|| anyhow!("no mapping path given (--mapping or `mapping` in the config)"))
    }

    pub fn require_atc(&self) -> Result<AtcCode> {
        self.atc
            .ok_or_else(|| anyhow!("no ATC code given (--atc or `atc` in the config)"))
    }

    /// Creates the output directory and checks that it accepts files.
    pub fn prepare_out_dir(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))?;
        let probe = self.out.join(".write-test");
        std::fs::write(&probe, b"")
            .with_context(|| format!("output directory {} is not writable", self.out.display()))?;
        let _ = std::fs::remove_file(probe);
        Ok(&self.out)
    }
}

/// Configured base kernels, or ES + Matérn-3/2 + RQ with unit
/// hyperparameters when none are given. Weights are all-or-nothing.
fn resolve_kernels(entries: &[FileKernel]) -> Result<(Vec<BaseKernel64>, Option<Vec<f64>>)> {
    if entries.is_empty() {
        return Ok((
            vec![
                BaseKernel64::exponential_squared(1.0, 1.0)?,
                BaseKernel64::matern(1.0, 1.0, Smoothness::ThreeHalves)?,
                BaseKernel64::rational_quadratic(1.0, 1.0, 1.0)?,
            ],
            None,
        ));
    }
    let mut kernels = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let variance = e.variance.unwrap_or(1.0);
        let lengthscale = e.lengthscale.unwrap_or(1.0);
        let k = match e.kind.to_ascii_lowercase().as_str() {
            "es" | "exponential_squared" | "squared_exponential" | "rbf" => {
                ensure!(
                    e.nu.is_none() && e.beta.is_none(),
                    "kernel {}: ES takes no nu or beta",
                    i + 1
                );
                BaseKernel64::exponential_squared(variance, lengthscale)
            }
            "matern" => {
                ensure!(e.beta.is_none(), "kernel {}: Matern takes no beta", i + 1);
                Smoothness::from_nu(e.nu.unwrap_or(1.5)).and_then(|nu| BaseKernel64::matern(variance, lengthscale, nu))
            }
            "rq" | "rational_quadratic" => {
                ensure!(e.nu.is_none(), "kernel {}: RQ takes no nu", i + 1);
                BaseKernel64::rational_quadratic(variance, lengthscale, e.beta.unwrap_or(1.0))
            }
            other => bail!("kernel {}: unknown kind `{other}` (es, matern, rq)", i + 1),
        }
        .with_context(|| format!("kernel {}", i + 1))?;
        kernels.push(k);
    }
    let given = entries.iter().filter(|e| e.weight.is_some()).count();
    let weights = match given {
        0 => None,
        n if n == entries.len() => Some(entries.iter().map(|e| e.weight.unwrap()).collect()),
        _ => bail!("either every [[kernel]] has a weight or none does"),
    };
    Ok((kernels, weights))
}

/// Lexical normalization; enough to catch `a/./b` vs `a/b` style aliases
/// without touching the filesystem (outputs may not exist yet).
fn normalize(p: &Path) -> PathBuf {
    let abs = if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().unwrap_or_default().join(p)
    };
    let mut out = PathBuf::new();
    for c in abs.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}
