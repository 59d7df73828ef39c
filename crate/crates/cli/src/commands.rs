use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use chrono::{Days, NaiveDate};

use ensemble_gp_core::bayesopt::{optimize_kernel_weights, BoConfig, BoOutcome, HoldoutData};
use ensemble_gp_core::data::{
    aggregate, ingest_transactions, map_to_categories, prepare_split, read_series_csv, AtcCode, AtcMapping,
    CategorySeries, PreparedSplit, Scaling, Segment, SplitMode,
};
use ensemble_gp_core::metrics::compute_metrics;
use ensemble_gp_core::{GpModel64, KernelSpec64, MetricsReport64, SearchSpace64};

use crate::config::RunConfig;
use crate::svg::{Chart, Layer};

pub const METRICS_FILE: &str = "metrics.csv";
pub const HISTORY_FILE: &str = "bo_history.csv";
pub const CONVERGENCE_FILE: &str = "convergence.svg";
pub const FORECAST_FILE: &str = "forecast.csv";
pub const REJECTS_FILE: &str = "rejects.csv";
pub const UNMAPPED_FILE: &str = "unmapped.csv";
pub const ENSEMBLE_LABEL: &str = "Ensemble";

fn open(path: &Path, what: &str) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {what} file {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

pub fn series_file_name(atc: AtcCode) -> String {
    format!("series_{}.csv", atc.file_stem())
}

/// Transactions → one series file per category present, plus rejects and
/// unmapped-brand reports.
pub fn ingest(cfg: &RunConfig) -> Result<Vec<CategorySeries>> {
    let input = cfg.require_input()?;
    let mapping_path = cfg.require_mapping()?;
    let mapping = AtcMapping::from_csv(open(mapping_path, "mapping")?)
        .with_context(|| format!("reading mapping {}", mapping_path.display()))?;
    let ingested = ingest_transactions(open(input, "transactions")?, &cfg.columns)
        .with_context(|| format!("reading transactions {}", input.display()))?;
    let out = cfg.prepare_out_dir()?;

    let mut w = create(&out.join(REJECTS_FILE))?;
    writeln!(w, "line,reason")?;
    for r in &ingested.rejects {
        writeln!(w, "{},\"{}\"", r.line, r.reason.replace('"', "\"\""))?;
    }
    w.flush()?;

    let categorized = map_to_categories(ingested.records, &mapping);
    let mut w = create(&out.join(UNMAPPED_FILE))?;
    writeln!(w, "brand,count")?;
    for (brand, n) in &categorized.unmapped {
        writeln!(w, "\"{}\",{n}", brand.replace('"', "\"\""))?;
    }
    w.flush()?;

    let mut all = Vec::new();
    for atc in AtcCode::ALL {
        if !categorized.records.iter().any(|r| r.atc == atc) {
            continue;
        }
        let series = aggregate(&categorized.records, atc, cfg.frequency)?;
        let path = out.join(series_file_name(atc));
        let mut w = create(&path)?;
        series.write_csv(&mut w)?;
        w.flush()?;
        println!(
            "{atc}: {} {} points, total quantity {} -> {}",
            series.len(),
            cfg.frequency,
            series.total(),
            path.display()
        );
        all.push(series);
    }
    println!(
        "{} rejected rows, {} unmapped records",
        ingested.rejects.len(),
        categorized.unmapped_count()
    );
    Ok(all)
}

pub fn load_series(cfg: &RunConfig) -> Result<CategorySeries> {
    let input = cfg.require_input()?;
    let atc = cfg.require_atc()?;
    read_series_csv(open(input, "input")?, cfg.format, atc, cfg.frequency)
        .with_context(|| format!("reading series {}", input.display()))
}

fn run_bo(cfg: &RunConfig, holdout: &HoldoutData<f64>) -> Result<BoOutcome<f64>> {
    let d = cfg.kernels.len();
    let space = if cfg.simplex {
        SearchSpace64::simplex(d)?
    } else {
        SearchSpace64::boxed(vec![(0.0, 1.0); d])?
    };
    let bo = BoConfig {
        iterations: cfg.iterations,
        seed: cfg.split.seed,
        acquisition: cfg.acquisition,
        noise_variance: cfg.noise_variance,
        score: cfg.score,
    };
    Ok(optimize_kernel_weights(holdout, &cfg.kernels, &space, &bo)?)
}

/// Configured weights, `[1]` for a single kernel, or a BO run on the
/// train/validation holdout.
fn resolve_weights(cfg: &RunConfig, split: &PreparedSplit) -> Result<(Vec<f64>, Option<BoOutcome<f64>>)> {
    if let Some(w) = &cfg.weights {
        return Ok((w.clone(), None));
    }
    if cfg.kernels.len() == 1 {
        return Ok((vec![1.0], None));
    }
    let outcome = run_bo(cfg, &split.holdout()?)?;
    Ok((outcome.best_weights.clone(), Some(outcome)))
}

fn write_history(outcome: &BoOutcome<f64>, out: &Path) -> Result<()> {
    let mut w = create(&out.join(HISTORY_FILE))?;
    outcome.state.write_history_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn fmt_weights(w: &[f64]) -> String {
    w.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Kernel names, suffixed `_2`, `_3`, ... when a kind repeats.
fn kernel_labels(cfg: &RunConfig) -> Vec<String> {
    let mut totals: HashMap<&str, usize> = HashMap::new();
    for k in &cfg.kernels {
        *totals.entry(k.name()).or_default() += 1;
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    cfg.kernels
        .iter()
        .map(|k| {
            let i = seen.entry(k.name()).or_default();
            *i += 1;
            if totals[k.name()] > 1 {
                format!("{}_{}", k.name(), i)
            } else {
                k.name().to_string()
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct KernelResult {
    pub label: String,
    /// `Err` holds the failure message of a row that could not be fit.
    pub report: std::result::Result<MetricsReport64, String>,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub weights: Vec<f64>,
    pub rows: Vec<KernelResult>,
}

/// Fits every base kernel and the ensemble on train, scores on test in
/// original units. Per-kernel failures become marked rows.
pub fn evaluate(cfg: &RunConfig) -> Result<Evaluation> {
    let series = load_series(cfg)?;
    let split = prepare_split(&series, &cfg.split)?;
    let out = cfg.prepare_out_dir()?;
    let (weights, outcome) = resolve_weights(cfg, &split)?;
    if let Some(o) = &outcome {
        write_history(o, out)?;
    }

    let mut specs: Vec<(String, Result<KernelSpec64>)> = kernel_labels(cfg)
        .into_iter()
        .zip(&cfg.kernels)
        .map(|(l, k)| (l, Ok(KernelSpec64::from(k.clone()))))
        .collect();
    specs.push((
        ENSEMBLE_LABEL.to_string(),
        KernelSpec64::ensemble(&weights, &cfg.kernels).map_err(Into::into),
    ));

    let train = PreparedSplit::training_set(&split.train)?;
    let actual: Vec<f64> = split
        .test
        .targets
        .iter()
        .map(|&z| split.scaling.unstandardize(z))
        .collect();
    let mut rows = Vec::with_capacity(specs.len());
    for (label, spec) in specs {
        let fitted = spec.and_then(|k| Ok(GpModel64::fit(&k, &train, cfg.noise_variance)?));
        let report = fitted.and_then(|model| {
            let predicted: Vec<f64> = model
                .predict_mean(&split.test.input_points())?
                .into_iter()
                .map(|z| split.scaling.unstandardize(z))
                .collect();
            let report = compute_metrics(&actual, &predicted)?;
            plot_fit(
                &model,
                &split,
                cfg.split.mode,
                &label,
                &out.join(format!("forecast_{label}.svg")),
            )?;
            Ok(report)
        });
        if let Err(e) = &report {
            eprintln!("warning: {label} failed: {e:#}");
        }
        rows.push(KernelResult {
            label,
            report: report.map_err(|e| format!("{e:#}")),
        });
    }

    let mut w = create(&out.join(METRICS_FILE))?;
    writeln!(w, "{}", MetricsReport64::CSV_HEADER)?;
    for r in &rows {
        let line = match &r.report {
            Ok(m) => m.to_csv_row(&r.label),
            Err(_) => format!("{},failed,failed,failed,failed,{}", r.label, split.test.len()),
        };
        println!("{line}");
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    println!("ensemble weights: {}", fmt_weights(&weights));
    Ok(Evaluation { weights, rows })
}

fn date_ticks(scaling: Scaling) -> Box<dyn Fn(f64) -> String> {
    Box::new(move |x| {
        let days = (x * scaling.time_span_days).round() as i64;
        let d = if days >= 0 {
            scaling.time_origin.checked_add_days(Days::new(days as u64))
        } else {
            scaling.time_origin.checked_sub_days(Days::new(days.unsigned_abs()))
        };
        d.map_or_else(String::new, |d| d.format("%Y-%m-%d").to_string())
    })
}

/// Actuals, posterior mean and ±2σ band over the whole sampled series.
fn plot_fit(model: &GpModel64, split: &PreparedSplit, mode: SplitMode, label: &str, path: &Path) -> Result<()> {
    let s = &split.scaling;
    let mut all: Vec<(f64, f64)> = split.all().inputs.into_iter().zip(split.all().targets).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<Vec<f64>> = all.iter().map(|p| vec![p.0]).collect();
    let preds = model.predict(&xs)?;

    let mut chart = Chart::new(
        format!("{label}: posterior mean and 2-sigma band"),
        "period",
        "quantity",
    );
    chart.x_ticks = date_ticks(*s);
    chart.layers.push(band_layer(
        all.iter()
            .map(|p| p.0)
            .zip(&preds)
            .map(|(x, p)| (x, p.mean, p.std_dev())),
        s,
    ));
    chart.layers.push(Layer::Line {
        points: all
            .iter()
            .zip(&preds)
            .map(|(p, q)| (p.0, s.unstandardize(q.mean)))
            .collect(),
        color: "#08519c",
        label: "posterior mean".into(),
    });
    let markers = |seg: &Segment| {
        seg.inputs
            .iter()
            .zip(&seg.targets)
            .map(|(&x, &z)| (x, s.unstandardize(z)))
            .collect()
    };
    chart.layers.push(Layer::Markers {
        points: [&split.train, &split.validation]
            .into_iter()
            .flat_map(markers)
            .collect(),
        color: "#969696",
        label: "train/validation".into(),
    });
    chart.layers.push(Layer::Markers {
        points: markers(&split.test),
        color: "#d62728",
        label: "test".into(),
    });
    if let (SplitMode::Chronological, Some(&x)) = (mode, split.test.inputs.first()) {
        chart.layers.push(Layer::Rule {
            x,
            label: "test".into(),
        });
    }
    std::fs::write(path, chart.render()).with_context(|| format!("cannot write {}", path.display()))
}

fn band_layer(points: impl Iterator<Item = (f64, f64, f64)>, s: &Scaling) -> Layer {
    Layer::Band {
        points: points
            .map(|(x, m, sd)| (x, s.unstandardize(m - 2.0 * sd), s.unstandardize(m + 2.0 * sd)))
            .collect(),
        color: "#6baed6",
        label: "mean ± 2σ".into(),
    }
}

/// BO over the kernel weights; prints the winner, writes history and a
/// convergence plot.
pub fn optimize(cfg: &RunConfig) -> Result<BoOutcome<f64>> {
    ensure!(
        cfg.kernels.len() >= 2,
        "optimize needs at least 2 base kernels (got {})",
        cfg.kernels.len()
    );
    let series = load_series(cfg)?;
    let split = prepare_split(&series, &cfg.split)?;
    let out = cfg.prepare_out_dir()?;
    let outcome = run_bo(cfg, &split.holdout()?)?;
    write_history(&outcome, out)?;

    let trials = outcome.state.trials();
    let mut chart = Chart::new("Best score so far", "iteration", "score");
    chart.layers.push(Layer::Markers {
        points: trials
            .iter()
            .enumerate()
            .filter(|(_, t)| t.score.is_finite())
            .map(|(i, t)| (i as f64, t.score))
            .collect(),
        color: "#969696",
        label: "trial score".into(),
    });
    chart.layers.push(Layer::Line {
        points: outcome
            .state
            .best_so_far()
            .into_iter()
            .enumerate()
            .filter(|(_, b)| b.is_finite())
            .map(|(i, b)| (i as f64, b))
            .collect(),
        color: "#08519c",
        label: "best so far".into(),
    });
    let path = out.join(CONVERGENCE_FILE);
    std::fs::write(&path, chart.render()).with_context(|| format!("cannot write {}", path.display()))?;

    let labels = kernel_labels(cfg);
    println!("best weights: {}", fmt_weights(&outcome.best_weights));
    for (l, w) in labels.iter().zip(&outcome.best_weights) {
        println!("  {l}: {w}");
    }
    println!("best score: {}", outcome.best_score);
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastPoint {
    pub timestamp: NaiveDate,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Fits the ensemble on every sampled point and predicts `horizon` periods
/// past the end of the series, in original units.
pub fn forecast(cfg: &RunConfig, horizon: usize) -> Result<Vec<ForecastPoint>> {
    if horizon == 0 {
        bail!("horizon must be a positive integer");
    }
    let series = load_series(cfg)?;
    let split = prepare_split(&series, &cfg.split)?;
    let out = cfg.prepare_out_dir()?;
    let (weights, _) = resolve_weights(cfg, &split)?;
    let kernel = KernelSpec64::ensemble(&weights, &cfg.kernels)?;
    let all = split.all();
    let model = GpModel64::fit(&kernel, &PreparedSplit::training_set(&all)?, cfg.noise_variance)?;

    let s = split.scaling;
    let last = series.points().last().expect("series is non-empty").0;
    let stamps: Vec<NaiveDate> = (1..=horizon)
        .map(|k| {
            let k = u32::try_from(k).context("horizon too large")?;
            Ok(series.frequency().advance(last, k))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<Vec<f64>> = stamps.iter().map(|&d| vec![s.scale_time(d)]).collect();
    let preds = model.predict(&xs)?;
    let points: Vec<ForecastPoint> = stamps
        .iter()
        .zip(&preds)
        .map(|(&timestamp, p)| {
            let sd = p.std_dev();
            ForecastPoint {
                timestamp,
                mean: s.unstandardize(p.mean),
                lower: s.unstandardize(p.mean - 2.0 * sd),
                upper: s.unstandardize(p.mean + 2.0 * sd),
            }
        })
        .collect();

    let mut w = create(&out.join(FORECAST_FILE))?;
    writeln!(w, "timestamp,mean,lower,upper")?;
    for p in &points {
        writeln!(
            w,
            "{},{},{},{}",
            p.timestamp.format("%Y-%m-%d"),
            p.mean,
            p.lower,
            p.upper
        )?;
    }
    w.flush()?;

    let mut chart = Chart::new(
        format!("{} forecast, {horizon} periods", series.atc()),
        "period",
        "quantity",
    );
    chart.x_ticks = date_ticks(s);
    chart.layers.push(band_layer(
        xs.iter().zip(&preds).map(|(x, p)| (x[0], p.mean, p.std_dev())),
        &s,
    ));
    chart.layers.push(Layer::Line {
        points: xs.iter().zip(&points).map(|(x, p)| (x[0], p.mean)).collect(),
        color: "#08519c",
        label: "forecast mean".into(),
    });
    chart.layers.push(Layer::Markers {
        points: all
            .inputs
            .iter()
            .zip(&all.targets)
            .map(|(&x, &z)| (x, s.unstandardize(z)))
            .collect(),
        color: "#969696",
        label: "observed".into(),
    });
    let path = out.join("forecast.svg");
    std::fs::write(&path, chart.render()).with_context(|| format!("cannot write {}", path.display()))?;
    println!("ensemble weights: {}", fmt_weights(&weights));
    println!(
        "wrote {} forecast periods to {}",
        points.len(),
        out.join(FORECAST_FILE).display()
    );
    Ok(points)
}
