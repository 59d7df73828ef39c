//! Zero-mean Gaussian process regression.

use crate::error::{Error, Result};
use crate::kernels::{gram_symmetric, KernelSpec};
use crate::linalg::{cholesky, dot, log_det, solve_cholesky, CholeskyFactor, JitterPolicy};
use crate::scalar::Scalar;

/// Posterior variances below this are treated as a broken factorization
/// rather than round-off.
pub const VARIANCE_CLAMP_TOLERANCE: f64 = 1e-10;

/// Default observation noise variance.
pub const DEFAULT_NOISE_VARIANCE: f64 = 1e-6;

/// Observed `(x, y)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T> {
    inputs: Vec<Vec<T>>,
    targets: Vec<T>,
}

impl<T: Scalar> TrainingSet<T> {
    pub fn new(inputs: Vec<Vec<T>>, targets: Vec<T>) -> Result<Self> {
        if inputs.is_empty() || targets.is_empty() {
            return Err(Error::EmptyInput);
        }
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: targets.len(),
            });
        }
        let dim = inputs[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("input dimension must be >= 1".into()));
        }
        for x in &inputs {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self { inputs, targets })
    }

    /// One-dimensional inputs, the common case for time series.
    pub fn from_scalar_inputs(xs: &[T], targets: Vec<T>) -> Result<Self> {
        Self::new(xs.iter().map(|&x| vec![x]).collect(), targets)
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }
}

/// Posterior predictive marginal at one test point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub mean: T,
    pub variance: T,
}

impl<T: Scalar> Prediction<T> {
    pub fn std_dev(&self) -> T {
        self.variance.sqrt()
    }
}

/// A fitted GP: the factor of `κ(X,X) + ε²I` and `α = (κ(X,X) + ε²I)⁻¹·y`.
#[derive(Debug, Clone)]
pub struct GpModel<T> {
    kernel: KernelSpec<T>,
    noise_variance: T,
    inputs: Vec<Vec<T>>,
    chol: CholeskyFactor<T>,
    alpha: Vec<T>,
}

impl<T: Scalar> GpModel<T> {
    /// Fits with the default jitter policy.
    pub fn fit(kernel: &KernelSpec<T>, data: &TrainingSet<T>, noise_variance: T) -> Result<Self> {
        Self::fit_with_policy(kernel, data, noise_variance, &JitterPolicy::default())
    }

    pub fn fit_with_policy(
        kernel: &KernelSpec<T>,
        data: &TrainingSet<T>,
        noise_variance: T,
        policy: &JitterPolicy<T>,
    ) -> Result<Self> {
        if !(noise_variance >= T::zero()) || !noise_variance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be finite and non-negative (got {noise_variance})"
            )));
        }
        kernel.validate()?;
        let mut k = gram_symmetric(kernel, data.inputs())?;
        k.add_diagonal(noise_variance);
        let chol = cholesky(&k, policy)?;
        let alpha = solve_cholesky(&chol, data.targets())?;
        Ok(Self {
            kernel: kernel.clone(),
            noise_variance,
            inputs: data.inputs().to_vec(),
            chol,
            alpha,
        })
    }

    pub fn kernel(&self) -> &KernelSpec<T> {
        &self.kernel
    }

    pub fn noise_variance(&self) -> T {
        self.noise_variance
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn cholesky(&self) -> &CholeskyFactor<T> {
        &self.chol
    }

    pub fn applied_jitter(&self) -> T {
        self.chol.applied_jitter()
    }

    /// Posterior mean and latent-function variance at each test input.
    pub fn predict(&self, test_inputs: &[Vec<T>]) -> Result<Vec<Prediction<T>>> {
        test_inputs.iter().map(|x| self.predict_one(x)).collect()
    }

    pub fn predict_one(&self, x: &[T]) -> Result<Prediction<T>> {
        let dim = self.inputs[0].len();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
        let k_star = self
            .inputs
            .iter()
            .map(|xi| self.kernel.eval(x, xi))
            .collect::<Result<Vec<_>>>()?;
        let mean = dot(&k_star, &self.alpha);
        let v = self.chol.forward_solve(&k_star)?;
        let raw = self.kernel.eval(x, x)? - dot(&v, &v);
        let variance = if raw >= T::zero() {
            raw
        } else if raw >= -T::lit(VARIANCE_CLAMP_TOLERANCE) {
            T::zero()
        } else {
            return Err(Error::NumericalError(format!(
                "posterior variance {raw} below clamp tolerance"
            )));
        };
        Ok(Prediction { mean, variance })
    }

    /// Posterior means only; skips the variance solve.
    pub fn predict_mean(&self, test_inputs: &[Vec<T>]) -> Result<Vec<T>> {
        let dim = self.inputs[0].len();
        test_inputs
            .iter()
            .map(|x| {
                if x.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: x.len(),
                    });
                }
                let mut acc = T::zero();
                for (xi, &a) in self.inputs.iter().zip(&self.alpha) {
                    acc = acc + self.kernel.eval(x, xi)? * a;
                }
                Ok(acc)
            })
            .collect()
    }

    /// `−½·yᵀα − ½·log|K + ε²I| − (n/2)·ln 2π`.
    pub fn log_marginal_likelihood(&self, targets: &[T]) -> Result<T> {
        let n = self.alpha.len();
        if targets.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: targets.len(),
            });
        }
        let half = T::lit(0.5);
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        Ok(-half * dot(targets, &self.alpha)
            - half * log_det(&self.chol)
            - half * T::from_usize(n).unwrap() * two_pi.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::BaseKernel;
    use approx::assert_relative_eq;

    fn es(variance: f64, lengthscale: f64) -> KernelSpec<f64> {
        BaseKernel::exponential_squared(variance, lengthscale).unwrap().into()
    }

    #[test]
    fn single_point_alpha() {
        let data = TrainingSet::from_scalar_inputs(&[0.0], vec![3.0]).unwrap();
        let m = GpModel::fit(&es(1.0, 1.0), &data, 0.0).unwrap();
        assert_eq!(m.alpha(), &[3.0]);
    }

    #[test]
    fn two_point_alpha_matches_closed_form_inverse() {
        let data = TrainingSet::from_scalar_inputs(&[0.0, 1.0], vec![1.0, 0.0]).unwrap();
        let m = GpModel::fit(&es(1.0, 1.0), &data, 0.0).unwrap();
        let c = (-0.5f64).exp();
        // [[1, c], [c, 1]]⁻¹ = 1/(1−c²)·[[1, −c], [−c, 1]]
        let det = 1.0 - c * c;
        assert_relative_eq!(m.alpha()[0], 1.0 / det, epsilon = 1e-12);
        assert_relative_eq!(m.alpha()[1], -c / det, epsilon = 1e-12);

        let p = m.predict_one(&[0.5]).unwrap();
        let k = (-0.125f64).exp();
        let expected_mean = k * (1.0 / det) + k * (-c / det);
        let expected_var = 1.0 - (k * k * (1.0 - c) * 2.0) / det;
        assert_relative_eq!(p.mean, expected_mean, epsilon = 1e-12);
        assert_relative_eq!(p.variance, expected_var, epsilon = 1e-12);
    }

    #[test]
    fn empty_and_mismatched_data() {
        assert!(matches!(
            TrainingSet::<f64>::new(vec![], vec![]),
            Err(Error::EmptyInput)
        ));
        assert!(TrainingSet::from_scalar_inputs(&[0.0, 1.0], vec![1.0]).is_err());
        assert!(matches!(
            TrainingSet::from_scalar_inputs(&[f64::NAN], vec![1.0]),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn interpolates_training_points() {
        let xs = [0.0, 1.5, 3.0, 4.5];
        let ys = vec![0.3, -1.2, 0.8, 2.0];
        let data = TrainingSet::from_scalar_inputs(&xs, ys.clone()).unwrap();
        let m = GpModel::fit_with_policy(&es(1.0, 1.0), &data, 0.0, &JitterPolicy::none()).unwrap();
        assert_eq!(m.applied_jitter(), 0.0);
        for (x, y) in xs.iter().zip(&ys) {
            let p = m.predict_one(&[*x]).unwrap();
            assert_relative_eq!(p.mean, *y, epsilon = 1e-8);
            assert!(p.variance <= 1e-8);
        }
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let data = TrainingSet::from_scalar_inputs(&[0.0, 1.0], vec![2.0, -1.0]).unwrap();
        let m = GpModel::fit(&es(1.7, 1.0), &data, 1e-6).unwrap();
        let p = m.predict_one(&[50.0]).unwrap();
        assert!(p.mean.abs() < 1e-6);
        assert_relative_eq!(p.variance, 1.7, epsilon = 1e-6);
    }

    #[test]
    fn predict_dimension_mismatch() {
        let data = TrainingSet::from_scalar_inputs(&[0.0], vec![1.0]).unwrap();
        let m = GpModel::fit(&es(1.0, 1.0), &data, 0.0).unwrap();
        assert!(matches!(
            m.predict(&[vec![0.0, 1.0]]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn log_marginal_likelihood_scalar_cases() {
        let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        let data = TrainingSet::from_scalar_inputs(&[0.0], vec![0.0]).unwrap();
        let m = GpModel::fit(&es(1.0, 1.0), &data, 0.0).unwrap();
        let lml = m.log_marginal_likelihood(&[0.0]).unwrap();
        assert_relative_eq!(lml, -half_ln_2pi, epsilon = 1e-15);
        assert_relative_eq!(lml, -0.918939, epsilon = 1e-6);

        let data = TrainingSet::from_scalar_inputs(&[0.0], vec![1.0]).unwrap();
        let m = GpModel::fit(&es(1.0, 1.0), &data, 0.0).unwrap();
        let lml = m.log_marginal_likelihood(&[1.0]).unwrap();
        assert_relative_eq!(lml, -1.418939, epsilon = 1e-6);
        assert!(m.log_marginal_likelihood(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn rejects_negative_noise() {
        let data = TrainingSet::from_scalar_inputs(&[0.0], vec![1.0]).unwrap();
        assert!(GpModel::fit(&es(1.0, 1.0), &data, -1.0).is_err());
    }

    #[test]
    fn duplicated_inputs_need_jitter() {
        let data = TrainingSet::from_scalar_inputs(&[0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]).unwrap();
        let m = GpModel::fit(&es(1.0, 1.0), &data, 0.0).unwrap();
        assert!(m.applied_jitter() > 0.0);
        assert!(GpModel::fit_with_policy(&es(1.0, 1.0), &data, 0.0, &JitterPolicy::none()).is_err());
    }
}
