use crate::error::Result;
use crate::grad_stats::GradMoments;
use crate::scalar::Scalar;
use crate::stopping::Partition;

/// Gradient of the training objective at one iterate, with its noise scale.
///
/// The signal-to-noise fraction of coordinate `k` is
/// `effective_size · grad_k² / var_hat_k`.
#[derive(Debug, Clone)]
pub struct GradientEstimate<T> {
    pub grad: Vec<T>,
    /// `None` when fewer than two samples contributed.
    pub var_hat: Option<Vec<T>>,
    pub effective_size: usize,
}

impl<T: Scalar> GradientEstimate<T> {
    pub fn from_moments(moments: &GradMoments<T>) -> Self {
        match moments.finalize() {
            Ok((grad, var)) => GradientEstimate {
                grad,
                var_hat: Some(var),
                effective_size: moments.count(),
            },
            Err(_) => GradientEstimate {
                grad: moments.mean().to_vec(),
                var_hat: None,
                effective_size: moments.count(),
            },
        }
    }
}

/// Losses recorded at one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Losses<T> {
    pub train: T,
    pub test: Option<T>,
    pub val: Option<T>,
}

/// A training problem as seen by the optimization loop.
pub trait Objective<T: Scalar>: Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Number of training instances mini-batches are drawn from.
    fn train_size(&self) -> usize;

    fn initial_params(&self) -> Vec<T>;

    /// Parameter groups for the grouped criterion (per layer, bias/weights, ...).
    fn partition(&self) -> Partition;

    /// Full-data gradient (`batch = None`) or mini-batch gradient.
    fn estimate(&self, w: &[T], batch: Option<&[usize]>) -> Result<GradientEstimate<T>>;

    fn train_loss(&self, w: &[T]) -> T;

    fn test_loss(&self, w: &[T]) -> Option<T>;

    fn val_loss(&self, _w: &[T]) -> Option<T> {
        None
    }

    /// All three losses; problems sharing work between them override this.
    fn losses(&self, w: &[T]) -> Losses<T> {
        Losses {
            train: self.train_loss(w),
            test: self.test_loss(w),
            val: self.val_loss(w),
        }
    }

    fn supports_batches(&self) -> bool {
        true
    }
}
