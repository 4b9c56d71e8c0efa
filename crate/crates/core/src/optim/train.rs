use std::time::Instant;

use super::config::{OptimizerConfig, OptimizerKind, StopperConfig, StopperKind};
use super::steps::{gd_step, masked_sgd_step, rmsprop_step};
use crate::error::{Error, Result};
use crate::grad_stats::snr_fractions;
use crate::numerics::RngStream;
use crate::problems::{Losses, Objective};
use crate::scalar::{all_finite, Scalar};
use crate::stopping::{
    grouped_from_fractions, off_fraction_rmsprop, EbState, ElementMask, MaskMode, Partition,
    StopDecision, ValidationStopper,
};

/// Every step up to this many parameters, every tenth step above.
pub const DENSE_LOG_MAX_DIM: usize = 1000;

pub fn default_log_interval(dim: usize) -> usize {
    if dim <= DENSE_LOG_MAX_DIM {
        1
    } else {
        10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopConfig {
    /// Number of parameter updates; must be at least 1.
    pub max_steps: usize,
    pub log_interval: usize,
    /// Seeds the mini-batch stream.
    pub seed: u64,
}

/// Snapshot at one step, taken before that step's update.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord<T> {
    pub step: usize,
    pub train_loss: T,
    pub test_loss: Option<T>,
    pub val_loss: Option<T>,
    /// Raw criterion value, combined over groups.
    pub criterion: Option<T>,
    pub group_criteria: Vec<T>,
    pub smoothed_criterion: Option<T>,
    pub off_fraction: Option<f64>,
    pub group_off_fractions: Vec<f64>,
    pub stop_event: bool,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary<T> {
    /// Updates performed.
    pub steps_run: usize,
    /// First step at which the stopper fired.
    pub stop_step: Option<usize>,
    pub stop_losses: Option<Losses<T>>,
    /// Smoothed criterion at the stop (EB stopper only).
    pub stop_criterion: Option<T>,
    pub params_at_stop: Option<Vec<T>>,
    pub final_params: Vec<T>,
    pub final_losses: Losses<T>,
    /// Logged step with the lowest test loss.
    pub best_test: Option<(usize, T)>,
    /// Step with the lowest validation loss among the evaluations.
    pub best_val_step: Option<usize>,
    pub records: Vec<TrainRecord<T>>,
}

impl<T: Scalar> RunSummary<T> {
    /// Stop step, or the run length if the stopper never fired.
    pub fn effective_stop(&self) -> usize {
        self.stop_step.unwrap_or(self.steps_run)
    }

    /// Test loss at the stop (or at the end).
    pub fn test_at_stop(&self) -> Option<T> {
        self.stop_losses.map_or(self.final_losses.test, |l| l.test)
    }

    pub fn test_curve(&self) -> Vec<(usize, T)> {
        self.records
            .iter()
            .filter_map(|r| r.test_loss.map(|l| (r.step, l)))
            .collect()
    }
}

enum OptState<T> {
    Plain,
    Rmsprop(Vec<T>),
    Masked(ElementMask<T>),
}

/// Runs an optimizer on `problem` until the stopper halts it or
/// `max_steps` updates are done, passing every logged record to `logger`.
pub fn train_loop<T: Scalar>(
    problem: &dyn Objective<T>,
    optimizer: &OptimizerConfig,
    stopper: &StopperConfig,
    config: &LoopConfig,
    logger: &mut dyn FnMut(&TrainRecord<T>) -> Result<()>,
) -> Result<RunSummary<T>> {
    if config.max_steps == 0 {
        return Err(Error::invalid("max_steps must be at least 1"));
    }
    if config.log_interval == 0 {
        return Err(Error::invalid("log_interval must be at least 1"));
    }
    optimizer.validate(problem.train_size(), problem.supports_batches())?;
    let dim = problem.dim();
    let partition = problem.partition();
    partition.check_dim(dim)?;

    let batched = optimizer.kind.uses_batches();
    if batched && optimizer.batch_size < 2 && matches!(stopper.kind, StopperKind::Eb { .. }) {
        return Err(Error::InsufficientSamples {
            needed: 2,
            have: optimizer.batch_size,
        });
    }

    let mut eb = None;
    let mut eb_partition = None;
    let mut validation = None;
    match stopper.kind {
        StopperKind::None => {}
        StopperKind::Eb {
            beta,
            warmup,
            boundary,
            grouped,
        } => {
            let p = if grouped {
                partition.clone()
            } else {
                Partition::whole(dim)?
            };
            eb = Some(EbState::new(
                p.len(),
                T::lit(beta),
                T::lit(warmup),
                boundary,
            )?);
            eb_partition = Some(p);
        }
        StopperKind::Validation {
            patience,
            eval_interval,
        } => {
            validation = Some(ValidationStopper::new(patience, eval_interval)?);
        }
    }

    let lr = T::lit(optimizer.learning_rate);
    let mut state = match (optimizer.kind, optimizer.kind.mask_mode()) {
        (OptimizerKind::Rmsprop, _) => OptState::Rmsprop(vec![T::zero(); dim]),
        (_, Some(mode)) => {
            let beta = T::lit(optimizer.mask_beta);
            let init = T::lit(optimizer.mask_init_value().expect("masked optimizer"));
            OptState::Masked(match mode {
                MaskMode::Greedy => ElementMask::greedy(dim, beta, init)?,
                MaskMode::NonGreedy => ElementMask::nongreedy(dim, beta, init)?,
            })
        }
        _ => OptState::Plain,
    };
    let needs_fractions = eb.is_some() || matches!(state, OptState::Masked(_));

    let mut rng = RngStream::new(config.seed);
    let mut w = problem.initial_params();
    if w.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: w.len(),
        });
    }

    let start = Instant::now();
    let mut records = Vec::new();
    let mut summary = RunSummary {
        steps_run: 0,
        stop_step: None,
        stop_losses: None,
        stop_criterion: None,
        params_at_stop: None,
        final_params: Vec::new(),
        final_losses: Losses {
            train: T::nan(),
            test: None,
            val: None,
        },
        best_test: None,
        best_val_step: None,
        records: Vec::new(),
    };

    let mut step = 0;
    loop {
        let at_end = step == config.max_steps;
        let mut record = TrainRecord {
            step,
            train_loss: T::nan(),
            test_loss: None,
            val_loss: None,
            criterion: None,
            group_criteria: Vec::new(),
            smoothed_criterion: None,
            off_fraction: None,
            group_off_fractions: Vec::new(),
            stop_event: false,
            wall_time: 0.0,
        };
        let mut stop_now = false;
        let mut next_w = None;

        if !at_end {
            let batch = if batched {
                let mut idx = rng.sample_indices(problem.train_size(), optimizer.batch_size);
                idx.sort_unstable();
                Some(idx)
            } else {
                None
            };
            let est = problem.estimate(&w, batch.as_deref())?;
            if !all_finite(&est.grad) {
                return Err(Error::Divergence { step });
            }

            let fractions = if needs_fractions {
                let var = est.var_hat.as_ref().ok_or(Error::InsufficientSamples {
                    needed: 2,
                    have: est.effective_size,
                })?;
                Some(snr_fractions(&est.grad, var, est.effective_size))
            } else {
                None
            };

            if let (Some(eb), Some(p), Some(f)) = (eb.as_mut(), eb_partition.as_ref(), &fractions) {
                let grouped = grouped_from_fractions(f, p)?;
                let was_stopped = eb.is_stopped();
                let decision = eb.update_and_decide(&grouped.per_group)?;
                record.criterion = Some(grouped.combined);
                record.group_criteria = grouped.per_group;
                record.smoothed_criterion = Some(eb.smoothed_combined());
                stop_now = decision == StopDecision::Stop && !was_stopped;
            }

            let updated = match &mut state {
                OptState::Plain => gd_step(&w, &est.grad, lr)?,
                OptState::Rmsprop(v) => {
                    let (w_new, v_new) = rmsprop_step(
                        &w,
                        &est.grad,
                        v,
                        lr,
                        T::lit(optimizer.rmsprop_gamma),
                        T::lit(optimizer.rmsprop_epsilon),
                    )?;
                    *v = v_new;
                    record.off_fraction =
                        off_fraction_rmsprop(v, T::lit(optimizer.rmsprop_off_threshold))
                            .ok()
                            .map(|x| x.to_f64_lossy());
                    w_new
                }
                OptState::Masked(mask) => {
                    let f = fractions.as_ref().expect("masked runs compute fractions");
                    match mask.mode() {
                        MaskMode::Greedy => {
                            mask.greedy_update(f, T::lit(optimizer.mask_threshold))?
                        }
                        MaskMode::NonGreedy => mask.nongreedy_update(f)?,
                    }
                    record.off_fraction = Some(mask.off_fraction());
                    record.group_off_fractions = mask.off_fraction_by_group(&partition)?;
                    masked_sgd_step(&w, &est.grad, mask, lr)?
                }
            };
            next_w = Some(updated);
        }

        let val_due = !at_end && validation.as_ref().is_some_and(|v| v.is_due(step));
        let logged = at_end || stop_now || val_due || step.is_multiple_of(config.log_interval);
        if logged {
            let losses = problem.losses(&w);
            if !losses.train.is_finite() {
                return Err(Error::Divergence { step });
            }
            record.train_loss = losses.train;
            record.test_loss = losses.test;
            record.val_loss = losses.val;
            if val_due {
                let v = validation.as_mut().expect("due implies present");
                let val = losses
                    .val
                    .ok_or_else(|| Error::invalid("validation stopper needs a validation split"))?;
                if v.update(step, val.to_f64_lossy())? == StopDecision::Stop
                    && summary.stop_step.is_none()
                {
                    stop_now = true;
                }
            }
            if stop_now && summary.stop_step.is_none() {
                summary.stop_step = Some(step);
                summary.stop_losses = Some(losses);
                summary.stop_criterion = record.smoothed_criterion;
                summary.params_at_stop = Some(w.clone());
                record.stop_event = true;
            }
            if at_end {
                summary.final_losses = losses;
            }
            if let Some(test) = losses.test {
                if summary.best_test.is_none_or(|(_, best)| test < best) {
                    summary.best_test = Some((step, test));
                }
            }
            record.wall_time = start.elapsed().as_secs_f64();
            logger(&record)?;
            records.push(record);
        }

        let halt = record_stop(&summary, step) && stopper.halt;
        if at_end || halt {
            if halt {
                summary.final_losses = summary.stop_losses.expect("stop recorded");
            }
            break;
        }
        w = next_w.expect("update computed before the end");
        step += 1;
    }

    summary.steps_run = step;
    summary.final_params = w;
    summary.best_val_step = validation.as_ref().and_then(|v| v.hindsight_argmin());
    summary.records = records;
    Ok(summary)
}

fn record_stop<T>(summary: &RunSummary<T>, step: usize) -> bool {
    summary.stop_step == Some(step)
}
