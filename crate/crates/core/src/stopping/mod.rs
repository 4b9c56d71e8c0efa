//! Evidence-based stopping rules, element-wise masks, off-fraction
//! diagnostics and the validation-loss baseline.

mod criterion;
mod mask;
mod partition;
mod state;
mod validation;

pub use criterion::{
    criterion_from_fractions, eb_criterion, eb_criterion_grouped, expected_log_evidence,
    grouped_from_fractions, log_evidence, off_fraction_rmsprop, GroupedCriterion,
};
pub use mask::{
    ElementMask, MaskMode, DEFAULT_GREEDY_INIT, DEFAULT_GREEDY_THRESHOLD, DEFAULT_NONGREEDY_INIT,
};
pub use partition::Partition;
pub use state::{Boundary, EbState, StopDecision, DEFAULT_BETA, DEFAULT_WARMUP};
pub use validation::{ValidationStopper, DEFAULT_PATIENCE};
