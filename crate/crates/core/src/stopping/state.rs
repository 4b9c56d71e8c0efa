use crate::error::{Error, Result};
use crate::grad_stats::EmaSmoother;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    Stop,
}

impl StopDecision {
    pub fn is_stop(self) -> bool {
        self == StopDecision::Stop
    }
}

/// Which side of zero counts as "stop".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// stop when the smoothed criterion is `≥ 0`
    #[default]
    Inclusive,
    /// stop only when it is `> 0`
    Strict,
}

impl Boundary {
    pub fn fires<T: Scalar>(self, value: T) -> bool {
        match self {
            Boundary::Inclusive => value >= T::zero(),
            Boundary::Strict => value > T::zero(),
        }
    }
}

pub const DEFAULT_BETA: f64 = 0.99;
pub const DEFAULT_WARMUP: f64 = -9.0;

/// Smoothed per-group criterion values and the terminal stop flag.
#[derive(Debug, Clone)]
pub struct EbState<T> {
    smoother: EmaSmoother<T>,
    boundary: Boundary,
    stopped: bool,
}

impl<T: Scalar> EbState<T> {
    pub fn new(groups: usize, beta: T, warmup: T, boundary: Boundary) -> Result<Self> {
        if groups == 0 {
            return Err(Error::invalid("EbState needs at least one group"));
        }
        Ok(EbState {
            smoother: EmaSmoother::new(groups, beta, warmup)?,
            boundary,
            stopped: false,
        })
    }

    pub fn with_defaults(groups: usize) -> Result<Self> {
        Self::new(
            groups,
            T::lit(DEFAULT_BETA),
            T::lit(DEFAULT_WARMUP),
            Boundary::Inclusive,
        )
    }

    pub fn groups(&self) -> usize {
        self.smoother.value().len()
    }

    pub fn smoothed(&self) -> &[T] {
        self.smoother.value()
    }

    /// Mean of the smoothed group values.
    pub fn smoothed_combined(&self) -> T {
        let v = self.smoother.value();
        v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
    }

    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    /// Feed one step's per-group criterion values. Once a stop has been
    /// returned every later call also returns [`StopDecision::Stop`].
    pub fn update_and_decide(&mut self, per_group_values: &[T]) -> Result<StopDecision> {
        self.smoother.update(per_group_values)?;
        if !self.stopped && self.boundary.fires(self.smoothed_combined()) {
            self.stopped = true;
        }
        Ok(if self.stopped {
            StopDecision::Stop
        } else {
            StopDecision::Continue
        })
    }
}
