//! Gaussian process regression with weighted ensemble kernels.
//!
//! The numerical core ([`linalg`], [`kernels`], [`gp`], [`bayesopt`],
//! [`metrics`]) is generic over the floating point type through [`Scalar`];
//! the aliases below fix it to `f64` or `f32`. The sales-data pipeline in
//! [`data`] works in `f64`.

// `!(x > 0)` style checks are deliberate: they send NaN down the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayesopt;
pub mod data;
pub mod error;
pub mod gp;
pub mod kernels;
pub mod linalg;
pub mod metrics;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type KernelSpec64 = kernels::KernelSpec<f64>;
pub type BaseKernel64 = kernels::BaseKernel<f64>;
pub type GpModel64 = gp::GpModel<f64>;
pub type TrainingSet64 = gp::TrainingSet<f64>;
pub type Prediction64 = gp::Prediction<f64>;
pub type SearchSpace64 = bayesopt::SearchSpace<f64>;
pub type BoState64 = bayesopt::BoState<f64>;
pub type MetricsReport64 = metrics::MetricsReport<f64>;

pub type KernelSpec32 = kernels::KernelSpec<f32>;
pub type BaseKernel32 = kernels::BaseKernel<f32>;
pub type GpModel32 = gp::GpModel<f32>;
pub type TrainingSet32 = gp::TrainingSet<f32>;
pub type Prediction32 = gp::Prediction<f32>;
pub type MetricsReport32 = metrics::MetricsReport<f32>;
