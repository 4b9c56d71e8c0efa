use super::state::StopDecision;
use crate::error::{Error, Result};

pub const DEFAULT_PATIENCE: usize = 10;

/// Patience-based stopping on a held-out loss, plus the hindsight optimum.
#[derive(Debug, Clone)]
pub struct ValidationStopper {
    patience: usize,
    eval_interval: usize,
    best: Option<(usize, f64)>,
    history: Vec<(usize, f64)>,
    stopped: bool,
}

impl ValidationStopper {
    pub fn new(patience: usize, eval_interval: usize) -> Result<Self> {
        if patience == 0 || eval_interval == 0 {
            return Err(Error::invalid(
                "validation stopper needs patience ≥ 1 and eval_interval ≥ 1",
            ));
        }
        Ok(ValidationStopper {
            patience,
            eval_interval,
            best: None,
            history: Vec::new(),
            stopped: false,
        })
    }

    pub fn eval_interval(&self) -> usize {
        self.eval_interval
    }

    pub fn is_due(&self, step: usize) -> bool {
        step.is_multiple_of(self.eval_interval)
    }

    pub fn best_loss(&self) -> Option<f64> {
        self.best.map(|b| b.1)
    }

    pub fn history(&self) -> &[(usize, f64)] {
        &self.history
    }

    /// Step with the lowest recorded validation loss (earliest on ties).
    pub fn hindsight_argmin(&self) -> Option<usize> {
        self.best.map(|b| b.0)
    }

    pub fn steps_since_best(&self) -> usize {
        match (self.best, self.history.last()) {
            (Some((b, _)), Some(&(last, _))) => last - b,
            _ => 0,
        }
    }

    pub fn update(&mut self, step: usize, val_loss: f64) -> Result<StopDecision> {
        if let Some(&(last, _)) = self.history.last() {
            if step <= last {
                return Err(Error::invalid(format!(
                    "validation steps must increase: {step} after {last}"
                )));
            }
        }
        self.history.push((step, val_loss));
        match self.best {
            Some((_, b)) if !(val_loss < b) => {}
            _ => self.best = Some((step, val_loss)),
        }
        if self.steps_since_best() >= self.patience * self.eval_interval {
            self.stopped = true;
        }
        Ok(if self.stopped {
            StopDecision::Stop
        } else {
            StopDecision::Continue
        })
    }
}
