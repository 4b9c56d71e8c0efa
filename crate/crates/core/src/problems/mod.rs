//! Objectives the optimizers are exercised on.

mod dataset;
mod fourier;
mod linear;
mod mlp;
mod objective;
mod quadratic;
mod supervised;
mod wdbc;

pub use dataset::{DataSplit, Split, SupervisedDataset, Target, Targets};
pub use fourier::{make_fourier_toy, FourierFeatures, FourierToy};
pub use linear::{logreg_per_sample_grad, poly2_expand, sigmoid, softplus, LeastSquares, Logistic};
pub use mlp::{mlp_forward_backward, Blobs, MlpArchitecture};
pub use objective::{GradientEstimate, Losses, Objective};
pub use quadratic::{
    make_quadratic, quad_criterion_inputs, quad_losses_and_grads, QuadEval, QuadraticInit,
    QuadraticProblem, SpectrumKind,
};
pub use supervised::{Model, SupervisedProblem};
pub use wdbc::{
    load_wdbc, load_wdbc_raw, parse_wdbc, wdbc_dataset, Standardizer, WdbcRaw, WdbcSplit,
    WDBC_FEATURES,
};
