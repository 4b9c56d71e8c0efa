//! Evidence-based early stopping for gradient-based training.
//!
//! The stopping rule compares observed gradients against the sampling noise
//! estimated from per-sample gradient variances and halts once the gradient
//! is statistically indistinguishable from zero, without a held-out set.
//!
//! Numeric code is generic over [`Scalar`] (`f32`/`f64`); the aliases at the
//! crate root fix it to `f64`.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grad_stats;
pub mod harness;
pub mod numerics;
pub mod optim;
pub mod problems;
pub mod scalar;
pub mod stopping;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DenseMatrix = numerics::DenseMatrix<f64>;
pub type GradMoments = grad_stats::GradMoments<f64>;
pub type EmaSmoother = grad_stats::EmaSmoother<f64>;
pub type EbState = stopping::EbState<f64>;
pub type ElementMask = stopping::ElementMask<f64>;
pub type GroupedCriterion = stopping::GroupedCriterion<f64>;
pub type QuadraticProblem = problems::QuadraticProblem<f64>;
pub type SupervisedDataset = problems::SupervisedDataset<f64>;
pub type GradientEstimate = problems::GradientEstimate<f64>;
pub type TrainRecord = optim::TrainRecord<f64>;
pub type RunSummary = optim::RunSummary<f64>;
