use crate::error::{Error, Result};
use crate::stopping::{
    Boundary, MaskMode, DEFAULT_BETA, DEFAULT_GREEDY_INIT, DEFAULT_GREEDY_THRESHOLD,
    DEFAULT_NONGREEDY_INIT, DEFAULT_PATIENCE, DEFAULT_WARMUP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Gd,
    Sgd,
    Rmsprop,
    MaskedSgdGreedy,
    MaskedSgdNongreedy,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Gd => "gd",
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Rmsprop => "rmsprop",
            OptimizerKind::MaskedSgdGreedy => "masked_sgd_greedy",
            OptimizerKind::MaskedSgdNongreedy => "masked_sgd_nongreedy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "gd" => OptimizerKind::Gd,
            "sgd" => OptimizerKind::Sgd,
            "rmsprop" => OptimizerKind::Rmsprop,
            "masked_sgd_greedy" => OptimizerKind::MaskedSgdGreedy,
            "masked_sgd_nongreedy" => OptimizerKind::MaskedSgdNongreedy,
            _ => return None,
        })
    }

    /// Whether gradients come from mini-batches.
    pub fn uses_batches(self) -> bool {
        !matches!(self, OptimizerKind::Gd)
    }

    pub fn mask_mode(self) -> Option<MaskMode> {
        match self {
            OptimizerKind::MaskedSgdGreedy => Some(MaskMode::Greedy),
            OptimizerKind::MaskedSgdNongreedy => Some(MaskMode::NonGreedy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub rmsprop_gamma: f64,
    /// Added outside the square root.
    pub rmsprop_epsilon: f64,
    /// Relative-step threshold for the logged RMSprop off-fraction.
    pub rmsprop_off_threshold: f64,
    pub mask_beta: f64,
    pub mask_threshold: f64,
    /// `None` picks the mode's default warm-up value.
    pub mask_init: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            kind: OptimizerKind::Gd,
            learning_rate: 0.01,
            batch_size: 32,
            rmsprop_gamma: 0.9,
            rmsprop_epsilon: 1e-8,
            rmsprop_off_threshold: 0.1,
            mask_beta: DEFAULT_BETA,
            mask_threshold: DEFAULT_GREEDY_THRESHOLD,
            mask_init: None,
        }
    }
}

impl OptimizerConfig {
    pub fn mask_init_value(&self) -> Option<f64> {
        self.kind.mask_mode().map(|mode| {
            self.mask_init.unwrap_or(match mode {
                MaskMode::Greedy => DEFAULT_GREEDY_INIT,
                MaskMode::NonGreedy => DEFAULT_NONGREEDY_INIT,
            })
        })
    }

    /// Checks ranges against a problem with `train_size` instances.
    pub fn validate(&self, train_size: usize, supports_batches: bool) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.kind.uses_batches() {
            if !supports_batches {
                return Err(Error::invalid(format!(
                    "optimizer {} needs a problem with per-sample gradients",
                    self.kind.name()
                )));
            }
            if self.batch_size == 0 {
                return Err(Error::invalid("batch_size must be at least 1"));
            }
            if self.batch_size > train_size {
                return Err(Error::invalid(format!(
                    "batch_size {} exceeds training-set size {train_size}",
                    self.batch_size
                )));
            }
        }
        if !(0.0..1.0).contains(&self.rmsprop_gamma) {
            return Err(Error::invalid("rmsprop_gamma must lie in [0, 1)"));
        }
        if !(self.rmsprop_epsilon >= 0.0) {
            return Err(Error::invalid("rmsprop_epsilon must be nonnegative"));
        }
        if !(0.0..1.0).contains(&self.mask_beta) {
            return Err(Error::invalid("mask_beta must lie in [0, 1)"));
        }
        if self.kind.mask_mode().is_some() && self.batch_size < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                have: self.batch_size,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopperKind {
    None,
    /// Smoothed evidence-based criterion; `grouped` averages per-group values
    /// over the problem's partition.
    Eb {
        beta: f64,
        warmup: f64,
        boundary: Boundary,
        grouped: bool,
    },
    /// Patience on the validation loss, evaluated every `eval_interval` steps.
    Validation {
        patience: usize,
        eval_interval: usize,
    },
}

impl StopperKind {
    pub fn eb() -> Self {
        StopperKind::Eb {
            beta: DEFAULT_BETA,
            warmup: DEFAULT_WARMUP,
            boundary: Boundary::Inclusive,
            grouped: false,
        }
    }

    pub fn validation() -> Self {
        StopperKind::Validation {
            patience: DEFAULT_PATIENCE,
            eval_interval: 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StopperKind::None => "none",
            StopperKind::Eb { .. } => "eb",
            StopperKind::Validation { .. } => "validation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopperConfig {
    pub kind: StopperKind,
    /// When false the stop event is recorded but training continues to
    /// `max_steps`.
    pub halt: bool,
}

impl Default for StopperConfig {
    fn default() -> Self {
        StopperConfig {
            kind: StopperKind::None,
            halt: true,
        }
    }
}

impl StopperConfig {
    pub fn eb() -> Self {
        StopperConfig {
            kind: StopperKind::eb(),
            halt: true,
        }
    }

    pub fn observe(mut self) -> Self {
        self.halt = false;
        self
    }
}
