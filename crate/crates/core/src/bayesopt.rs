//! Bayesian optimization of ensemble kernel weights.
//!
//! The objective is a black box `ω ↦ score` (higher is better). A GP
//! surrogate is fit over weight space to the standardized scores seen so
//! far, and the next `ω` is the candidate with the largest expected
//! improvement among `candidate_count` uniform samples from the search
//! space.
//!
//! The loop is seeded with `d + 1` deterministic points (simplex vertices
//! plus the barycentre, or random box corners) so that every base kernel is
//! tried on its own before the surrogate takes over.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gp::{GpModel, TrainingSet};
use crate::kernels::{BaseKernel, KernelSpec};
use crate::metrics::rmse;
use crate::scalar::Scalar;

pub const DEFAULT_XI: f64 = 0.01;
pub const DEFAULT_CANDIDATE_COUNT: usize = 2048;
/// Surrogate lengthscale as a fraction of the mean bound width.
pub const SURROGATE_LENGTHSCALE_FRACTION: f64 = 0.2;
/// Noise variance of the surrogate, on the standardized score scale.
pub const SURROGATE_NOISE_VARIANCE: f64 = 1e-6;

// ChaCha stream reserved for the seed design; acquisition steps use the trial count.
const SEED_DESIGN_STREAM: u64 = u64::MAX;

/// Box (optionally simplex-constrained) over ensemble weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace<T> {
    bounds: Vec<(T, T)>,
    simplex: bool,
}

impl<T: Scalar> SearchSpace<T> {
    /// The probability simplex in `d` dimensions.
    pub fn simplex(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("search space needs d >= 1".into()));
        }
        Ok(Self {
            bounds: vec![(T::zero(), T::one()); d],
            simplex: true,
        })
    }

    /// Axis-aligned box with `0 <= lo < hi` in every dimension.
    pub fn boxed(bounds: Vec<(T, T)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidArgument("search space needs d >= 1".into()));
        }
        for &(lo, hi) in &bounds {
            if !(lo >= T::zero() && lo < hi && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "invalid bound [{lo}, {hi}]; need 0 <= lo < hi < inf"
                )));
            }
        }
        Ok(Self { bounds, simplex: false })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    pub fn is_simplex(&self) -> bool {
        self.simplex
    }

    pub fn mean_width(&self) -> T {
        self.bounds.iter().map(|&(lo, hi)| hi - lo).sum::<T>() / T::from_usize(self.dim()).unwrap()
    }

    pub fn contains(&self, w: &[T]) -> bool {
        w.len() == self.dim() && w.iter().zip(&self.bounds).all(|(&v, &(lo, hi))| v >= lo && v <= hi)
    }

    /// One uniform draw. On the simplex this uses sorted-uniform spacings.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<T> {
        if self.simplex {
            let d = self.dim();
            let mut cuts: Vec<f64> = (0..d - 1).map(|_| rng.random::<f64>()).collect();
            cuts.sort_by(f64::total_cmp);
            let mut prev = 0.0;
            let mut w = Vec::with_capacity(d);
            for c in cuts.into_iter().chain(std::iter::once(1.0)) {
                w.push(T::lit(c - prev));
                prev = c;
            }
            w
        } else {
            self.bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * T::lit(rng.random::<f64>()))
                .collect()
        }
    }

    /// The `d + 1` initial design points.
    pub fn seed_points(&self, seed: u64) -> Vec<Vec<T>> {
        let d = self.dim();
        if self.simplex {
            let mut pts: Vec<Vec<T>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect())
                .collect();
            if d > 1 {
                pts.push(vec![T::one() / T::from_usize(d).unwrap(); d]);
            } else {
                // the 1-d simplex is a single point
                pts.push(vec![T::one()]);
            }
            return pts;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SEED_DESIGN_STREAM);
        let masks: Vec<u64> = if d <= 16 {
            let mut all: Vec<u64> = (0..1u64 << d).collect();
            all.shuffle(&mut rng);
            all.truncate(d + 1);
            all
        } else {
            let mut picked = Vec::with_capacity(d + 1);
            while picked.len() < d + 1 {
                let m = rng.random::<u64>();
                if !picked.contains(&m) {
                    picked.push(m);
                }
            }
            picked
        };
        masks
            .into_iter()
            .map(|mask| {
                self.bounds
                    .iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| if (mask >> (i % 64)) & 1 == 1 { hi } else { lo })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial<T> {
    pub weights: Vec<T>,
    /// `-inf` marks an evaluation whose fit failed.
    pub score: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionConfig<T> {
    pub xi: T,
    pub candidate_count: usize,
}

impl<T: Scalar> Default for AcquisitionConfig<T> {
    fn default() -> Self {
        Self {
            xi: T::lit(DEFAULT_XI),
            candidate_count: DEFAULT_CANDIDATE_COUNT,
        }
    }
}

/// Trial history plus the acquisition configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoState<T> {
    trials: Vec<Trial<T>>,
    pub acquisition: AcquisitionConfig<T>,
    pub rng_seed: u64,
}

impl<T: Scalar> BoState<T> {
    pub fn new(acquisition: AcquisitionConfig<T>, rng_seed: u64) -> Self {
        Self {
            trials: Vec::new(),
            acquisition,
            rng_seed,
        }
    }

    pub fn trials(&self) -> &[Trial<T>] {
        &self.trials
    }

    pub fn push(&mut self, trial: Trial<T>) {
        self.trials.push(trial);
    }

    /// First trial with the maximal finite score.
    pub fn best(&self) -> Option<&Trial<T>> {
        let mut best: Option<&Trial<T>> = None;
        for t in &self.trials {
            if t.score.is_finite() && best.is_none_or(|b| t.score > b.score) {
                best = Some(t);
            }
        }
        best
    }

    /// Running maximum of the scores, `-inf` until a finite score appears.
    pub fn best_so_far(&self) -> Vec<T> {
        let mut best = T::neg_infinity();
        self.trials
            .iter()
            .map(|t| {
                if t.score > best {
                    best = t.score;
                }
                best
            })
            .collect()
    }

    /// Writes `iteration,w_1..w_d,score,best_so_far`, one row per trial.
    /// Seed trials come first; `iteration` is the 0-based trial index.
    pub fn write_history_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let d = self.trials.first().map_or(0, |t| t.weights.len());
        let mut header = String::from("iteration");
        for i in 1..=d {
            header.push_str(&format!(",w_{i}"));
        }
        header.push_str(",score,best_so_far");
        writeln!(out, "{header}")?;
        for (i, (t, b)) in self.trials.iter().zip(self.best_so_far()).enumerate() {
            let mut row = i.to_string();
            for w in &t.weights {
                row.push_str(&format!(",{w}"));
            }
            row.push_str(&format!(",{},{b}", t.score));
            writeln!(out, "{row}")?;
        }
        Ok(())
    }

    /// Generator for the acquisition step at `trials.len()`.
    fn step_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(self.trials.len() as u64);
        rng
    }
}

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    (-T::lit(0.5) * z * z).exp() / T::lit((2.0 * std::f64::consts::PI).sqrt())
}

/// Standard normal distribution function.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    T::lit(0.5 * erfc(-z.to_f64_lossy() / std::f64::consts::SQRT_2))
}

/// Closed-form `E[max(f − best − ξ, 0)]` for `f ~ N(mean, sd²)`.
pub fn expected_improvement<T: Scalar>(mean: T, sd: T, best: T, xi: T) -> T {
    let gap = mean - best - xi;
    if !(sd > T::zero()) {
        return gap.max(T::zero());
    }
    let z = gap / sd;
    (gap * normal_cdf(z) + sd * normal_pdf(z)).max(T::zero())
}

/// Index of the first maximal value.
pub fn argmax_first<T: Scalar>(values: &[T]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Surrogate GP over weight space, fit to standardized scores.
#[derive(Debug, Clone)]
pub struct Surrogate<T> {
    pub model: GpModel<T>,
    /// Best observed score on the standardized scale.
    pub best: T,
}

impl<T: Scalar> Surrogate<T> {
    /// Expected improvement at each point.
    pub fn expected_improvements(&self, points: &[Vec<T>], xi: T) -> Result<Vec<T>> {
        Ok(self
            .model
            .predict(points)?
            .into_iter()
            .map(|p| expected_improvement(p.mean, p.std_dev(), self.best, xi))
            .collect())
    }
}

/// Fits the surrogate to the trial history.
///
/// Scores are standardized to zero mean and unit variance. Failed trials
/// (`-inf`) take the worst finite score so the surrogate steers away from
/// them. The kernel is ES with `α²` the sample variance of the standardized
/// scores (1 when they are all equal) and `λ = 0.2 · mean bound width`.
pub fn fit_surrogate<T: Scalar>(state: &BoState<T>, space: &SearchSpace<T>) -> Result<Surrogate<T>> {
    let trials = state.trials();
    if trials.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let worst = trials
        .iter()
        .map(|t| t.score)
        .filter(|s| s.is_finite())
        .fold(T::infinity(), T::min);
    let raw: Vec<T> = trials
        .iter()
        .map(|t| {
            if t.score.is_finite() {
                t.score
            } else if worst.is_finite() {
                worst
            } else {
                T::zero()
            }
        })
        .collect();
    let n = T::from_usize(raw.len()).unwrap();
    let mean = raw.iter().copied().sum::<T>() / n;
    let var = raw.iter().map(|&s| (s - mean) * (s - mean)).sum::<T>() / n;
    let sd = if var > T::zero() { var.sqrt() } else { T::one() };
    let standardized: Vec<T> = raw.iter().map(|&s| (s - mean) / sd).collect();

    let std_var = standardized.iter().map(|&s| s * s).sum::<T>() / n;
    let variance = if std_var > T::zero() { std_var } else { T::one() };
    let lengthscale = T::lit(SURROGATE_LENGTHSCALE_FRACTION) * space.mean_width();
    let kernel: KernelSpec<T> = BaseKernel::exponential_squared(variance, lengthscale)?.into();

    let best = standardized
        .iter()
        .zip(trials)
        .filter(|(_, t)| t.score.is_finite())
        .map(|(&s, _)| s)
        .fold(T::neg_infinity(), T::max);
    let best = if best.is_finite() {
        best
    } else {
        standardized.iter().copied().fold(T::neg_infinity(), T::max)
    };

    let data = TrainingSet::new(trials.iter().map(|t| t.weights.clone()).collect(), standardized)?;
    let model = GpModel::fit(&kernel, &data, T::lit(SURROGATE_NOISE_VARIANCE))?;
    Ok(Surrogate { model, best })
}

/// The candidate set for the next acquisition step; depends only on the
/// seed and the number of trials recorded so far.
pub fn sample_candidates<T: Scalar>(state: &BoState<T>, space: &SearchSpace<T>) -> Vec<Vec<T>> {
    let mut rng = state.step_rng();
    (0..state.acquisition.candidate_count.max(1))
        .map(|_| space.sample(&mut rng))
        .collect()
}

/// Proposes the next weight vector: the expected-improvement maximizer over
/// the sampled candidates, ties going to the lowest index.
pub fn acquire_threshold<T: Scalar>(state: &BoState<T>, space: &SearchSpace<T>) -> Result<Vec<T>> {
    let surrogate = fit_surrogate(state, space)?;
    let candidates = sample_candidates(state, space);
    let ei = surrogate.expected_improvements(&candidates, state.acquisition.xi)?;
    let idx = argmax_first(&ei).expect("candidate set is non-empty");
    Ok(candidates.into_iter().nth(idx).unwrap())
}

/// Train segment for fitting and a held-out segment for scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldoutData<T> {
    pub train: TrainingSet<T>,
    pub validation_inputs: Vec<Vec<T>>,
    pub validation_targets: Vec<T>,
}

impl<T: Scalar> HoldoutData<T> {
    pub fn new(train: TrainingSet<T>, validation_inputs: Vec<Vec<T>>, validation_targets: Vec<T>) -> Result<Self> {
        if validation_inputs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if validation_inputs.len() != validation_targets.len() {
            return Err(Error::DimensionMismatch {
                expected: validation_inputs.len(),
                found: validation_targets.len(),
            });
        }
        Ok(Self {
            train,
            validation_inputs,
            validation_targets,
        })
    }
}

/// What "score" means for a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreKind {
    /// `−RMSE` of the posterior mean on the validation segment.
    #[default]
    NegativeRmse,
    /// Log marginal likelihood of the training segment.
    LogMarginalLikelihood,
}

/// `−RMSE` on the validation segment of the ensemble `Σ ωᵢ·κᵢ` fit on the
/// training segment.
pub fn evaluate_model<T: Scalar>(
    data: &HoldoutData<T>,
    base_kernels: &[BaseKernel<T>],
    omega: &[T],
    noise_variance: T,
) -> Result<T> {
    evaluate_model_with(data, base_kernels, omega, noise_variance, ScoreKind::NegativeRmse)
}

/// Like [`evaluate_model`] with a selectable score. A fit that is not
/// positive definite, or an all-zero `ω`, scores `-inf`.
pub fn evaluate_model_with<T: Scalar>(
    data: &HoldoutData<T>,
    base_kernels: &[BaseKernel<T>],
    omega: &[T],
    noise_variance: T,
    score: ScoreKind,
) -> Result<T> {
    if omega.len() != base_kernels.len() {
        return Err(Error::InvalidArgument(format!(
            "weight vector has {} entries for {} base kernels",
            omega.len(),
            base_kernels.len()
        )));
    }
    let kernel = match KernelSpec::ensemble(omega, base_kernels) {
        Ok(k) => k,
        Err(Error::ZeroWeightSum) => return Ok(T::neg_infinity()),
        Err(e) => return Err(e),
    };
    let model = match GpModel::fit(&kernel, &data.train, noise_variance) {
        Ok(m) => m,
        Err(Error::NotPositiveDefinite { .. }) => return Ok(T::neg_infinity()),
        Err(e) => return Err(e),
    };
    match score {
        ScoreKind::NegativeRmse => {
            let predicted = model.predict_mean(&data.validation_inputs)?;
            Ok(-rmse(&data.validation_targets, &predicted)?)
        }
        ScoreKind::LogMarginalLikelihood => model.log_marginal_likelihood(data.train.targets()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoConfig<T> {
    pub iterations: usize,
    pub seed: u64,
    pub acquisition: AcquisitionConfig<T>,
    pub noise_variance: T,
    pub score: ScoreKind,
}

impl<T: Scalar> BoConfig<T> {
    pub fn new(iterations: usize, seed: u64) -> Self {
        Self {
            iterations,
            seed,
            acquisition: AcquisitionConfig::default(),
            noise_variance: T::lit(crate::gp::DEFAULT_NOISE_VARIANCE),
            score: ScoreKind::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoOutcome<T> {
    pub best_weights: Vec<T>,
    pub best_score: T,
    pub state: BoState<T>,
}

/// Evaluates the seed design, then runs `iterations` rounds of
/// acquire → evaluate → update-best → record.
pub fn optimize_kernel_weights<T: Scalar>(
    data: &HoldoutData<T>,
    base_kernels: &[BaseKernel<T>],
    space: &SearchSpace<T>,
    config: &BoConfig<T>,
) -> Result<BoOutcome<T>> {
    if config.iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be >= 1".into()));
    }
    if space.dim() != base_kernels.len() {
        return Err(Error::DimensionMismatch {
            expected: base_kernels.len(),
            found: space.dim(),
        });
    }
    let mut state = BoState::new(config.acquisition, config.seed);
    let mut best_weights: Option<Vec<T>> = None;
    let mut max_score = T::neg_infinity();

    let mut record = |state: &mut BoState<T>, weights: Vec<T>| -> Result<()> {
        let score = evaluate_model_with(data, base_kernels, &weights, config.noise_variance, config.score)?;
        if score > max_score {
            max_score = score;
            best_weights = Some(weights.clone());
        }
        state.push(Trial { weights, score });
        Ok(())
    };

    for w in space.seed_points(config.seed) {
        record(&mut state, w)?;
    }
    for _ in 0..config.iterations {
        let w = acquire_threshold(&state, space)?;
        record(&mut state, w)?;
    }

    let best_weights = best_weights.ok_or(Error::NoValidTrial)?;
    Ok(BoOutcome {
        best_weights,
        best_score: max_score,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ei_examples() {
        assert_eq!(expected_improvement(1.0, 0.0, 1.0, 0.0), 0.0);
        assert_relative_eq!(expected_improvement(1.0, 1.0, 1.0, 0.0), 0.398942, epsilon = 1e-6);
        assert_relative_eq!(expected_improvement(11.0, 1e-12, 1.0, 0.0), 10.0, epsilon = 1e-9);
        assert_eq!(expected_improvement(11.0, 0.0, 1.0, 0.0), 10.0);
        assert_eq!(expected_improvement(0.5, 0.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn ei_matches_quadrature() {
        // trapezoid rule over ±12 sd of max(f − best, 0)·pdf
        for &(gap, sd) in &[(0.0, 1.0), (-1.0, 0.5), (0.7, 2.0)] {
            let steps = 200_000;
            let lo = gap - 12.0 * sd;
            let h = 24.0 * sd / steps as f64;
            let mut acc = 0.0;
            for i in 0..=steps {
                let f = lo + h * i as f64;
                let pdf = (-(f - gap).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                acc += w * f.max(0.0) * pdf;
            }
            acc *= h;
            assert_relative_eq!(expected_improvement(gap, sd, 0.0, 0.0), acc, epsilon = 1e-7);
        }
    }

    #[test]
    fn simplex_samples_sum_to_one() {
        let space = SearchSpace::<f64>::simplex(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let w = space.sample(&mut rng);
            assert!(w.iter().all(|&v| v >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seed_designs() {
        let s = SearchSpace::<f64>::simplex(3).unwrap();
        let pts = s.seed_points(0);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(pts[3], vec![1.0 / 3.0; 3]);

        let b = SearchSpace::boxed(vec![(0.0, 1.0), (0.5, 2.0)]).unwrap();
        let pts = b.seed_points(9);
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert!(b.contains(p));
            assert!(p[0] == 0.0 || p[0] == 1.0);
            assert!(p[1] == 0.5 || p[1] == 2.0);
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
        assert_eq!(pts, b.seed_points(9));
    }

    #[test]
    fn invalid_spaces() {
        assert!(SearchSpace::<f64>::simplex(0).is_err());
        assert!(SearchSpace::boxed(vec![(1.0, 1.0)]).is_err());
        assert!(SearchSpace::boxed(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn empty_history_is_an_error() {
        let state = BoState::<f64>::new(AcquisitionConfig::default(), 0);
        let space = SearchSpace::simplex(2).unwrap();
        assert!(matches!(acquire_threshold(&state, &space), Err(Error::EmptyHistory)));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax_first(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax_first::<f64>(&[]), None);
    }

    #[test]
    fn best_skips_failed_trials() {
        let mut s = BoState::new(AcquisitionConfig::default(), 0);
        s.push(Trial {
            weights: vec![1.0],
            score: f64::NEG_INFINITY,
        });
        assert!(s.best().is_none());
        s.push(Trial {
            weights: vec![0.5],
            score: -2.0,
        });
        s.push(Trial {
            weights: vec![0.2],
            score: -2.0,
        });
        assert_eq!(s.best().unwrap().weights, vec![0.5]);
        assert_eq!(s.best_so_far(), vec![f64::NEG_INFINITY, -2.0, -2.0]);
    }

    #[test]
    fn history_csv_layout() {
        let mut s = BoState::new(AcquisitionConfig::default(), 0);
        s.push(Trial {
            weights: vec![1.0, 0.0],
            score: -0.5,
        });
        s.push(Trial {
            weights: vec![0.25, 0.75],
            score: -0.25,
        });
        let mut buf = Vec::new();
        s.write_history_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,w_1,w_2,score,best_so_far\n0,1,0,-0.5,-0.5\n1,0.25,0.75,-0.25,-0.25\n"
        );
    }

    fn toy_holdout() -> HoldoutData<f64> {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.5).collect();
        let train = TrainingSet::from_scalar_inputs(
            &xs.iter().step_by(2).copied().collect::<Vec<_>>(),
            xs.iter().step_by(2).map(|x| x.sin()).collect(),
        )
        .unwrap();
        let val: Vec<f64> = xs.iter().skip(1).step_by(2).copied().collect();
        HoldoutData::new(
            train,
            val.iter().map(|&x| vec![x]).collect(),
            val.iter().map(|x| x.sin()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_model_edge_cases() {
        let bases = vec![BaseKernel::exponential_squared(1.0, 1.0).unwrap()];
        let data = toy_holdout();
        assert!(evaluate_model(&data, &bases, &[1.0, 0.0], 1e-6).is_err());
        assert_eq!(evaluate_model(&data, &bases, &[0.0], 1e-6).unwrap(), f64::NEG_INFINITY);
        let s = evaluate_model(&data, &bases, &[1.0], 1e-6).unwrap();
        assert!(s < 0.0 && s > -0.1);
        assert_eq!(s, evaluate_model(&data, &bases, &[1.0], 1e-6).unwrap());
    }

    #[test]
    fn single_kernel_box_run() {
        let bases = vec![BaseKernel::exponential_squared(1.0, 1.0).unwrap()];
        let space = SearchSpace::boxed(vec![(0.0, 1.0)]).unwrap();
        let mut cfg = BoConfig::new(1, 5);
        cfg.acquisition.candidate_count = 64;
        let out = optimize_kernel_weights(&toy_holdout(), &bases, &space, &cfg).unwrap();
        assert_eq!(out.state.trials().len(), 3);
        let max = out
            .state
            .trials()
            .iter()
            .map(|t| t.score)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(out.best_score, max);
        assert!(out.state.trials().iter().all(|t| space.contains(&t.weights)));
    }

    #[test]
    fn zero_iterations_rejected() {
        let bases = vec![BaseKernel::exponential_squared(1.0, 1.0).unwrap()];
        let space = SearchSpace::boxed(vec![(0.0, 1.0)]).unwrap();
        assert!(optimize_kernel_weights(&toy_holdout(), &bases, &space, &BoConfig::new(0, 0)).is_err());
    }
}
