//! Train/validation/test partitioning with standardization.

use std::str::FromStr;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::series::CategorySeries;
use crate::bayesopt::HoldoutData;
use crate::error::{Error, Result};
use crate::gp::TrainingSet;

pub const MIN_SERIES_LEN: usize = 3;

// Kept apart from the subsampling draw, which uses the default stream.
const RANDOM_SPLIT_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleCount {
    #[default]
    All,
    Count(usize),
}

impl FromStr for SampleCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Self::Count(n)),
            _ => Err(Error::InvalidArgument(format!(
                "sample count must be a positive integer or `all` (got `{s}`)"
            ))),
        }
    }
}

/// How points are assigned to segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Contiguous blocks: train precedes validation precedes test.
    #[default]
    Chronological,
    /// Seeded random assignment; each segment is kept in time order.
    /// Held-out points then sit between training points (interpolation).
    Random,
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chronological" => Ok(Self::Chronological),
            "random" => Ok(Self::Random),
            _ => Err(Error::InvalidArgument(format!(
                "split mode must be chronological or random (got `{s}`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub sample_count: SampleCount,
    pub mode: SplitMode,
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            sample_count: SampleCount::All,
            mode: SplitMode::Chronological,
            train_fraction: 0.6,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

/// Affine maps between raw and model units, fit on the training segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    pub target_mean: f64,
    pub target_sd: f64,
    pub time_origin: NaiveDate,
    /// Length of the training span in days; input 1.0 is the last training timestamp.
    pub time_span_days: f64,
}

impl Scaling {
    pub fn standardize(&self, y: f64) -> f64 {
        (y - self.target_mean) / self.target_sd
    }

    pub fn unstandardize(&self, z: f64) -> f64 {
        z * self.target_sd + self.target_mean
    }

    pub fn scale_time(&self, d: NaiveDate) -> f64 {
        (d - self.time_origin).num_days() as f64 / self.time_span_days
    }
}

/// One chronological segment. `targets` are standardized.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Segment {
    pub timestamps: Vec<NaiveDate>,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input_points(&self) -> Vec<Vec<f64>> {
        self.inputs.iter().map(|&x| vec![x]).collect()
    }

    fn concat<'a>(parts: impl IntoIterator<Item = &'a Segment>) -> Segment {
        let mut out = Segment::default();
        for p in parts {
            out.timestamps.extend_from_slice(&p.timestamps);
            out.inputs.extend_from_slice(&p.inputs);
            out.targets.extend_from_slice(&p.targets);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSplit {
    pub train: Segment,
    pub validation: Segment,
    pub test: Segment,
    pub scaling: Scaling,
}

impl PreparedSplit {
    /// Train segment for fitting, validation segment for scoring.
    pub fn holdout(&self) -> Result<HoldoutData<f64>> {
        HoldoutData::new(
            TrainingSet::from_scalar_inputs(&self.train.inputs, self.train.targets.clone())?,
            self.validation.input_points(),
            self.validation.targets.clone(),
        )
    }

    /// Train and validation segments together.
    pub fn train_and_validation(&self) -> Segment {
        Segment::concat([&self.train, &self.validation])
    }

    /// All three segments in order.
    pub fn all(&self) -> Segment {
        Segment::concat([&self.train, &self.validation, &self.test])
    }

    pub fn training_set(segment: &Segment) -> Result<TrainingSet<f64>> {
        TrainingSet::from_scalar_inputs(&segment.inputs, segment.targets.clone())
    }
}

/// Optionally subsamples, then splits by `floor(n·fraction)` with the
/// remainder going to test. Scaling statistics come from train only.
pub fn prepare_split(series: &CategorySeries, config: &SplitConfig) -> Result<PreparedSplit> {
    let (tf, vf) = (config.train_fraction, config.validation_fraction);
    if !(tf > 0.0 && tf < 1.0 && vf > 0.0 && vf < 1.0 && tf + vf < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fractions must lie in (0, 1) with a sum below 1 (got {tf}, {vf})"
        )));
    }
    let mut points: Vec<(NaiveDate, f64)> = series.points().to_vec();
    if let SampleCount::Count(k) = config.sample_count {
        if k > points.len() {
            return Err(Error::InvalidArgument(format!(
                "sample count {k} exceeds series length {}",
                points.len()
            )));
        }
        if k < points.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut idx = rand::seq::index::sample(&mut rng, points.len(), k).into_vec();
            idx.sort_unstable();
            points = idx.into_iter().map(|i| points[i]).collect();
        }
    }
    let n = points.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: n,
            min: MIN_SERIES_LEN,
        });
    }
    let n_train = (n as f64 * tf).floor() as usize;
    let n_val = (n as f64 * vf).floor() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(Error::InvalidArgument(format!(
            "fractions {tf}/{vf} leave an empty segment for {n} points"
        )));
    }

    let (train_raw, val_raw, test_raw) = match config.mode {
        SplitMode::Chronological => (
            points[..n_train].to_vec(),
            points[n_train..n_train + n_val].to_vec(),
            points[n_train + n_val..].to_vec(),
        ),
        SplitMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(RANDOM_SPLIT_STREAM);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let pick = |ix: &[usize]| {
                let mut ix = ix.to_vec();
                ix.sort_unstable();
                ix.into_iter().map(|i| points[i]).collect::<Vec<_>>()
            };
            (
                pick(&idx[..n_train]),
                pick(&idx[n_train..n_train + n_val]),
                pick(&idx[n_train + n_val..]),
            )
        }
    };

    let target_mean = train_raw.iter().map(|p| p.1).sum::<f64>() / n_train as f64;
    let var = train_raw.iter().map(|p| (p.1 - target_mean).powi(2)).sum::<f64>() / n_train as f64;
    let target_sd = if var > 0.0 { var.sqrt() } else { 1.0 };
    let time_origin = train_raw[0].0;
    let span = (train_raw[n_train - 1].0 - time_origin).num_days() as f64;
    let scaling = Scaling {
        target_mean,
        target_sd,
        time_origin,
        time_span_days: if span > 0.0 { span } else { 1.0 },
    };

    let segment = |pts: &[(NaiveDate, f64)]| Segment {
        timestamps: pts.iter().map(|p| p.0).collect(),
        inputs: pts.iter().map(|p| scaling.scale_time(p.0)).collect(),
        targets: pts.iter().map(|p| scaling.standardize(p.1)).collect(),
    };
    Ok(PreparedSplit {
        train: segment(&train_raw),
        validation: segment(&val_raw),
        test: segment(&test_raw),
        scaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ingest::AtcCode;
    use crate::data::series::Frequency;
    use chrono::Days;

    fn series(values: &[f64]) -> CategorySeries {
        let start = NaiveDate::from_ymd_opt(2016, 1, 4).unwrap();
        CategorySeries::from_points(
            AtcCode::M01AB,
            Frequency::Weekly,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (start + Days::new(7 * i as u64), v))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn six_two_two() {
        let s = series(&(0..10).map(|i| (i * i) as f64).collect::<Vec<_>>());
        let p = prepare_split(&s, &SplitConfig::default()).unwrap();
        assert_eq!((p.train.len(), p.validation.len(), p.test.len()), (6, 2, 2));
        assert!(p.train.timestamps.last() < p.validation.timestamps.first());
        assert!(p.validation.timestamps.last() < p.test.timestamps.first());
        assert_eq!(p.train.inputs[0], 0.0);
        assert_eq!(p.train.inputs[5], 1.0);
        assert!(p.test.inputs[0] > 1.0);
    }

    #[test]
    fn standardized_train_targets() {
        let s = series(&[3.0, 7.0, 1.0, 9.0, 4.0, 4.5, 8.0, 2.0, 6.0, 5.0]);
        let p = prepare_split(&s, &SplitConfig::default()).unwrap();
        let n = p.train.len() as f64;
        let mean = p.train.targets.iter().sum::<f64>() / n;
        let var = p.train.targets.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-10);
        assert!((var - 1.0).abs() < 1e-10);
        for (z, (_, y)) in p.all().targets.iter().zip(s.points()) {
            assert!((p.scaling.unstandardize(*z) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn subsampling_is_seeded_and_chronological() {
        let s = series(&(0..50).map(|i| i as f64).collect::<Vec<_>>());
        let cfg = SplitConfig {
            sample_count: SampleCount::Count(20),
            seed: 11,
            ..SplitConfig::default()
        };
        let a = prepare_split(&s, &cfg).unwrap();
        let b = prepare_split(&s, &cfg).unwrap();
        assert_eq!(a, b);
        let all = a.all();
        assert_eq!(all.len(), 20);
        assert!(all.timestamps.windows(2).all(|w| w[0] < w[1]));
        let c = prepare_split(&s, &SplitConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.all().timestamps, c.all().timestamps);
    }

    #[test]
    fn too_short_and_bad_fractions() {
        let s = series(&[1.0, 2.0]);
        assert!(matches!(
            prepare_split(&s, &SplitConfig::default()),
            Err(Error::SeriesTooShort { len: 2, min: 3 })
        ));
        let s = series(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let bad = SplitConfig {
            train_fraction: 0.7,
            validation_fraction: 0.4,
            ..SplitConfig::default()
        };
        assert!(prepare_split(&s, &bad).is_err());
        let over = SplitConfig {
            sample_count: SampleCount::Count(6),
            ..SplitConfig::default()
        };
        assert!(prepare_split(&s, &over).is_err());
    }

    #[test]
    fn random_mode_partitions_and_interleaves() {
        let s = series(&(0..40).map(|i| (i % 7) as f64).collect::<Vec<_>>());
        let cfg = SplitConfig {
            mode: SplitMode::Random,
            seed: 5,
            ..SplitConfig::default()
        };
        let a = prepare_split(&s, &cfg).unwrap();
        assert_eq!(a, prepare_split(&s, &cfg).unwrap());
        assert_eq!((a.train.len(), a.validation.len(), a.test.len()), (24, 8, 8));
        let mut all = a.all().timestamps;
        all.sort_unstable();
        let expected: Vec<_> = s.points().iter().map(|p| p.0).collect();
        assert_eq!(all, expected);
        for seg in [&a.train, &a.validation, &a.test] {
            assert!(seg.timestamps.windows(2).all(|w| w[0] < w[1]));
        }
        // some held-out point lies strictly inside the training span
        assert!(a.test.inputs.iter().any(|&x| x > 0.0 && x < 1.0));
        assert_eq!("Random".parse::<SplitMode>().unwrap(), SplitMode::Random);
        assert!("shuffle".parse::<SplitMode>().is_err());
    }

    #[test]
    fn sample_count_parsing() {
        assert_eq!("all".parse::<SampleCount>().unwrap(), SampleCount::All);
        assert_eq!("25".parse::<SampleCount>().unwrap(), SampleCount::Count(25));
        assert!("0".parse::<SampleCount>().is_err());
        assert!("x".parse::<SampleCount>().is_err());
    }
}
