//! Optimizers and the training loop.

mod config;
mod steps;
mod train;

pub use config::{OptimizerConfig, OptimizerKind, StopperConfig, StopperKind};
pub use steps::{gd_step, masked_sgd_step, rmsprop_step, sgd_step};
pub use train::{
    default_log_interval, train_loop, LoopConfig, RunSummary, TrainRecord, DENSE_LOG_MAX_DIM,
};
