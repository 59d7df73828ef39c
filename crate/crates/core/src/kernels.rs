//! Stationary covariance functions and their weighted-sum ensemble.
//!
//! Three base families are provided, each parameterised by a variance `α²`
//! and a lengthscale `λ`:
//!
//! * exponential squared: `α²·exp(−r²/(2λ²))`
//! * Matérn with half-integer smoothness `ν ∈ {1/2, 3/2, 5/2}` in closed form
//! * rational quadratic: `α²·(1 + r²/(2βλ²))^(−β)`
//!
//! An [`KernelSpec::Ensemble`] is a non-negatively weighted sum of base
//! kernels. Nesting is one level deep by construction, since components are
//! [`BaseKernel`]s.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::scalar::Scalar;

/// Matérn smoothness, restricted to the half-integer closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothness {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl Smoothness {
    pub fn from_nu(nu: f64) -> Result<Self> {
        match nu {
            0.5 => Ok(Self::Half),
            1.5 => Ok(Self::ThreeHalves),
            2.5 => Ok(Self::FiveHalves),
            _ => Err(Error::InvalidKernel(format!(
                "matern nu must be one of 0.5, 1.5, 2.5 (got {nu})"
            ))),
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            Self::Half => 0.5,
            Self::ThreeHalves => 1.5,
            Self::FiveHalves => 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseKernel<T> {
    ExponentialSquared {
        variance: T,
        lengthscale: T,
    },
    Matern {
        variance: T,
        lengthscale: T,
        nu: Smoothness,
    },
    RationalQuadratic {
        variance: T,
        lengthscale: T,
        beta: T,
    },
}

impl<T: Scalar> BaseKernel<T> {
    pub fn exponential_squared(variance: T, lengthscale: T) -> Result<Self> {
        let k = Self::ExponentialSquared { variance, lengthscale };
        k.validate()?;
        Ok(k)
    }

    pub fn matern(variance: T, lengthscale: T, nu: Smoothness) -> Result<Self> {
        let k = Self::Matern {
            variance,
            lengthscale,
            nu,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn rational_quadratic(variance: T, lengthscale: T, beta: T) -> Result<Self> {
        let k = Self::RationalQuadratic {
            variance,
            lengthscale,
            beta,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn variance(&self) -> T {
        match *self {
            Self::ExponentialSquared { variance, .. }
            | Self::Matern { variance, .. }
            | Self::RationalQuadratic { variance, .. } => variance,
        }
    }

    pub fn lengthscale(&self) -> T {
        match *self {
            Self::ExponentialSquared { lengthscale, .. }
            | Self::Matern { lengthscale, .. }
            | Self::RationalQuadratic { lengthscale, .. } => lengthscale,
        }
    }

    /// Short human-readable family name, used in report tables and file names.
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExponentialSquared { .. } => "ExponentialSquared",
            Self::Matern { .. } => "Matern",
            Self::RationalQuadratic { .. } => "RationalQuadratic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidKernel(format!(
                    "{name} must be positive and finite (got {v})"
                )))
            }
        };
        positive("variance", self.variance())?;
        positive("lengthscale", self.lengthscale())?;
        if let Self::RationalQuadratic { beta, .. } = *self {
            positive("beta", beta)?;
        }
        Ok(())
    }

    /// Evaluates the kernel as a function of the squared distance `r²`.
    pub fn eval_sq_dist(&self, r2: T) -> T {
        let half = T::lit(0.5);
        match *self {
            Self::ExponentialSquared { variance, lengthscale } => {
                variance * (-half * r2 / (lengthscale * lengthscale)).exp()
            }
            Self::Matern {
                variance,
                lengthscale,
                nu,
            } => {
                let s = r2.sqrt() / lengthscale;
                match nu {
                    Smoothness::Half => variance * (-s).exp(),
                    Smoothness::ThreeHalves => {
                        let a = T::lit(3f64.sqrt()) * s;
                        variance * (T::one() + a) * (-a).exp()
                    }
                    Smoothness::FiveHalves => {
                        let a = T::lit(5f64.sqrt()) * s;
                        let q = T::lit(5.0 / 3.0) * s * s;
                        variance * (T::one() + a + q) * (-a).exp()
                    }
                }
            }
            Self::RationalQuadratic {
                variance,
                lengthscale,
                beta,
            } => {
                let u = r2 / (T::lit(2.0) * beta * lengthscale * lengthscale);
                // ln_1p keeps the large-beta limit accurate
                variance * (-beta * u.ln_1p()).exp()
            }
        }
    }
}

impl<T: Scalar> fmt::Display for BaseKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExponentialSquared { variance, lengthscale } => {
                write!(f, "ES(variance={variance}, lengthscale={lengthscale})")
            }
            Self::Matern {
                variance,
                lengthscale,
                nu,
            } => write!(
                f,
                "Matern(variance={variance}, lengthscale={lengthscale}, nu={})",
                nu.nu()
            ),
            Self::RationalQuadratic {
                variance,
                lengthscale,
                beta,
            } => write!(f, "RQ(variance={variance}, lengthscale={lengthscale}, beta={beta})"),
        }
    }
}

/// One weighted component of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Component<T> {
    pub weight: T,
    pub kernel: BaseKernel<T>,
}

/// A covariance function: either a single base kernel or a weighted ensemble.
///
/// Ensemble weights are kept as given; use [`KernelSpec::normalize_weights`]
/// to project them onto the simplex.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec<T> {
    Base(BaseKernel<T>),
    Ensemble(Vec<Component<T>>),
}

impl<T: Scalar> From<BaseKernel<T>> for KernelSpec<T> {
    fn from(k: BaseKernel<T>) -> Self {
        Self::Base(k)
    }
}

impl<T: Scalar> KernelSpec<T> {
    /// Pairs `weights` with `kernels` and validates the result.
    pub fn ensemble(weights: &[T], kernels: &[BaseKernel<T>]) -> Result<Self> {
        if weights.len() != kernels.len() {
            return Err(Error::DimensionMismatch {
                expected: kernels.len(),
                found: weights.len(),
            });
        }
        let k = Self::Ensemble(
            weights
                .iter()
                .zip(kernels)
                .map(|(&weight, kernel)| Component {
                    weight,
                    kernel: kernel.clone(),
                })
                .collect(),
        );
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Base(k) => k.validate(),
            Self::Ensemble(components) => {
                if components.is_empty() {
                    return Err(Error::InvalidKernel("ensemble has no components".into()));
                }
                for c in components {
                    if !(c.weight >= T::zero()) || !c.weight.is_finite() {
                        return Err(Error::InvalidKernel(format!(
                            "ensemble weight must be finite and non-negative (got {})",
                            c.weight
                        )));
                    }
                    c.kernel.validate()?;
                }
                if components.iter().all(|c| c.weight == T::zero()) {
                    return Err(Error::ZeroWeightSum);
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Base(k) => k.name(),
            Self::Ensemble(_) => "Ensemble",
        }
    }

    /// `κ(x, x)`, the prior variance at any point.
    pub fn prior_variance(&self) -> T {
        self.eval_sq_dist(T::zero())
    }

    pub fn weights(&self) -> Option<Vec<T>> {
        match self {
            Self::Base(_) => None,
            Self::Ensemble(c) => Some(c.iter().map(|c| c.weight).collect()),
        }
    }

    pub fn eval_sq_dist(&self, r2: T) -> T {
        match self {
            Self::Base(k) => k.eval_sq_dist(r2),
            Self::Ensemble(components) => components
                .iter()
                .fold(T::zero(), |acc, c| acc + c.weight * c.kernel.eval_sq_dist(r2)),
        }
    }

    /// `κ(x, x')` for two points of equal dimension.
    pub fn eval(&self, x: &[T], x_prime: &[T]) -> Result<T> {
        Ok(self.eval_sq_dist(sq_dist(x, x_prime)?))
    }

    /// Copy of an ensemble with weights divided by their sum.
    pub fn normalize_weights(&self) -> Result<Self> {
        match self {
            Self::Base(_) => Err(Error::InvalidArgument(
                "normalize_weights requires an ensemble kernel".into(),
            )),
            Self::Ensemble(components) => {
                let total: T = components.iter().map(|c| c.weight).sum();
                if !(total > T::zero()) {
                    return Err(Error::ZeroWeightSum);
                }
                Ok(Self::Ensemble(
                    components
                        .iter()
                        .map(|c| Component {
                            weight: c.weight / total,
                            kernel: c.kernel.clone(),
                        })
                        .collect(),
                ))
            }
        }
    }
}

impl<T: Scalar> fmt::Display for KernelSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Base(k) => k.fmt(f),
            Self::Ensemble(components) => {
                f.write_str("Ensemble[")?;
                for (i, c) in components.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{}*{}", c.weight, c.kernel)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Squared Euclidean distance; rejects unequal dimensions and non-finite values.
pub fn sq_dist<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let d = a - b;
        acc = acc + d * d;
    }
    Ok(acc)
}

/// Kernel matrix `κ(X, X')` together with the kernel that produced it.
#[derive(Debug, Clone)]
pub struct GramMatrix<T> {
    pub entries: Matrix<T>,
    pub kernel: KernelSpec<T>,
}

/// Cross-covariance `κ(xs, xs_prime)`.
///
/// When both point lists are equal the result is computed once per unordered
/// pair, so it is exactly symmetric.
pub fn gram<T: Scalar>(k: &KernelSpec<T>, xs: &[Vec<T>], xs_prime: &[Vec<T>]) -> Result<GramMatrix<T>> {
    if xs.is_empty() || xs_prime.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim = xs[0].len();
    check_dims(dim, xs)?;
    check_dims(dim, xs_prime)?;
    let mut entries = Matrix::zeros(xs.len(), xs_prime.len());
    if xs == xs_prime {
        let sym = gram_symmetric(k, xs)?;
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                entries.set(i, j, sym.get(i, j));
            }
        }
    } else {
        for (i, a) in xs.iter().enumerate() {
            for (j, b) in xs_prime.iter().enumerate() {
                entries.set(i, j, k.eval(a, b)?);
            }
        }
    }
    Ok(GramMatrix {
        entries,
        kernel: k.clone(),
    })
}

/// `κ(xs, xs)` as a [`SymMatrix`].
pub fn gram_symmetric<T: Scalar>(k: &KernelSpec<T>, xs: &[Vec<T>]) -> Result<SymMatrix<T>> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_dims(xs[0].len(), xs)?;
    let mut m = SymMatrix::zeros(xs.len())?;
    for i in 0..xs.len() {
        for j in i..xs.len() {
            m.set(i, j, k.eval(&xs[i], &xs[j])?);
        }
    }
    Ok(m)
}

fn check_dims<T>(dim: usize, xs: &[Vec<T>]) -> Result<()> {
    match xs.iter().find(|x| x.len() != dim) {
        Some(x) => Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn es() -> BaseKernel<f64> {
        BaseKernel::exponential_squared(1.0, 1.0).unwrap()
    }

    fn reference_ensemble() -> KernelSpec<f64> {
        KernelSpec::ensemble(
            &[0.66, 0.21, 0.13],
            &[
                es(),
                BaseKernel::matern(1.0, 1.0, Smoothness::ThreeHalves).unwrap(),
                BaseKernel::rational_quadratic(1.0, 1.0, 1.0).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn es_values() {
        let k = KernelSpec::from(es());
        assert_eq!(k.eval(&[0.3], &[0.3]).unwrap(), 1.0);
        assert_relative_eq!(k.eval(&[0.0], &[1.0]).unwrap(), (-0.5f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(k.eval(&[0.0], &[1.0]).unwrap(), 0.606531, epsilon = 1e-6);
    }

    #[test]
    fn matern_half_matches_general_form() {
        // α²·2^{1−ν}/Γ(ν)·z^ν·K_ν(z) with ν = 1/2, Γ(1/2) = √π, K_{1/2}(z) = √(π/(2z))·e^{−z}
        let k = BaseKernel::matern(1.0, 1.0, Smoothness::Half).unwrap();
        for r in [0.25f64, 1.0, 2.5] {
            let z = r;
            let general = 2f64.powf(0.5) / std::f64::consts::PI.sqrt()
                * z.sqrt()
                * (std::f64::consts::PI / (2.0 * z)).sqrt()
                * (-z).exp();
            assert_relative_eq!(k.eval_sq_dist(r * r), general, epsilon = 1e-14);
        }
        assert_relative_eq!(k.eval_sq_dist(1.0), 0.367879, epsilon = 1e-6);
    }

    #[test]
    fn ensemble_weight_sum_at_zero_distance() {
        assert_relative_eq!(reference_ensemble().eval(&[2.0], &[2.0]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dimension_and_finiteness_errors() {
        let k = KernelSpec::from(es());
        assert!(matches!(
            k.eval(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(k.eval(&[f64::NAN], &[0.0]), Err(Error::NonFiniteInput)));
    }

    #[test]
    fn gram_cases() {
        let k = KernelSpec::from(es());
        let g = gram(&k, &[vec![0.0]], &[vec![0.0]]).unwrap();
        assert_eq!(g.entries.get(0, 0), 1.0);

        let xs = vec![vec![0.0], vec![1.0]];
        let g = gram(&k, &xs, &xs).unwrap();
        assert_eq!(g.entries.get(0, 0), 1.0);
        assert_eq!(g.entries.get(1, 1), 1.0);
        assert_relative_eq!(g.entries.get(0, 1), (-0.5f64).exp(), epsilon = 1e-15);
        assert_eq!(g.entries.get(0, 1), g.entries.get(1, 0));

        assert!(matches!(gram(&k, &[], &xs), Err(Error::EmptyInput)));
        assert!(matches!(gram_symmetric(&k, &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn normalization() {
        let bases = [es(), es(), es()];
        let k = KernelSpec::ensemble(&[2.0, 1.0, 1.0], &bases).unwrap();
        assert_eq!(k.normalize_weights().unwrap().weights().unwrap(), vec![0.5, 0.25, 0.25]);

        let w = reference_ensemble().normalize_weights().unwrap().weights().unwrap();
        for (a, b) in w.iter().zip([0.66, 0.21, 0.13]) {
            assert_relative_eq!(*a, b, epsilon = 1e-12);
        }

        let zero = KernelSpec::Ensemble(
            bases
                .iter()
                .map(|k| Component {
                    weight: 0.0,
                    kernel: k.clone(),
                })
                .collect(),
        );
        assert!(matches!(zero.normalize_weights(), Err(Error::ZeroWeightSum)));
        assert!(matches!(zero.validate(), Err(Error::ZeroWeightSum)));
    }

    #[test]
    fn invalid_hyperparameters() {
        assert!(BaseKernel::exponential_squared(0.0, 1.0).is_err());
        assert!(BaseKernel::rational_quadratic(1.0, 1.0, -1.0).is_err());
        assert!(BaseKernel::matern(1.0, f64::INFINITY, Smoothness::Half).is_err());
        assert!(Smoothness::from_nu(2.0).is_err());
        assert_eq!(Smoothness::from_nu(1.5).unwrap(), Smoothness::ThreeHalves);
        assert!(KernelSpec::ensemble(&[1.0], &[es(), es()]).is_err());
        assert!(KernelSpec::ensemble(&[-1.0, 2.0], &[es(), es()]).is_err());
        assert!(KernelSpec::<f64>::Ensemble(vec![]).validate().is_err());
    }
}
