use rayon::prelude::*;

use super::dataset::{DataSplit, Split, SupervisedDataset, Target};
use super::objective::{GradientEstimate, Objective};
use crate::error::{Error, Result};
use crate::grad_stats::GradMoments;
use crate::scalar::Scalar;
use crate::stopping::Partition;

/// Per-sample loss of a parametric model.
pub trait Model<T: Scalar>: Sync {
    /// Number of parameters.
    fn dim(&self) -> usize;

    /// Expected feature length.
    fn input_dim(&self) -> usize;

    fn partition(&self) -> Partition {
        Partition::whole(self.dim()).expect("model has parameters")
    }

    /// Loss of one sample. When `grad` is given it is overwritten with the
    /// gradient with respect to `w`.
    fn loss_grad(&self, w: &[T], x: &[T], y: Target<T>, grad: Option<&mut [T]>) -> T;
}

/// Empirical risk of a [`Model`] on the training split of a dataset, with
/// held-out splits for validation and test losses.
#[derive(Debug, Clone)]
pub struct SupervisedProblem<T, M> {
    name: String,
    model: M,
    train: DataSplit<T>,
    val: DataSplit<T>,
    test: DataSplit<T>,
    init: Vec<T>,
    partition: Partition,
}

impl<T: Scalar, M: Model<T>> SupervisedProblem<T, M> {
    pub fn new(
        name: impl Into<String>,
        model: M,
        data: &SupervisedDataset<T>,
        init: Vec<T>,
    ) -> Result<Self> {
        if data.n_features() != model.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.input_dim(),
                got: data.n_features(),
            });
        }
        if init.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                got: init.len(),
            });
        }
        let train = data.split(Split::Train);
        if train.is_empty() {
            return Err(Error::invalid("training split is empty"));
        }
        let partition = model.partition();
        Ok(SupervisedProblem {
            name: name.into(),
            train,
            val: data.split(Split::Validation),
            test: data.split(Split::Test),
            init,
            partition,
            model,
        })
    }

    /// Replaces the model's default parameter grouping.
    pub fn with_partition(mut self, partition: Partition) -> Result<Self> {
        partition.check_dim(self.model.dim())?;
        self.partition = partition;
        Ok(self)
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn split(&self, split: Split) -> &DataSplit<T> {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.val,
            Split::Test => &self.test,
        }
    }

    /// Mean loss over a split; `None` when the split is empty.
    pub fn mean_loss(&self, split: Split, w: &[T]) -> Option<T> {
        let data = self.split(split);
        if data.is_empty() {
            return None;
        }
        let losses: Vec<T> = (0..data.len())
            .into_par_iter()
            .map(|i| {
                self.model
                    .loss_grad(w, data.row(i), data.targets.get(i), None)
            })
            .collect();
        let total: T = losses.into_iter().sum();
        Some(total / T::from_usize_lossy(data.len()))
    }

    /// Moments of the per-sample training gradients at `w` over `indices`.
    pub fn batch_moments(&self, w: &[T], indices: &[usize]) -> Result<GradMoments<T>> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.train.len()) {
            return Err(Error::invalid(format!(
                "batch index {bad} out of range for {} training samples",
                self.train.len()
            )));
        }
        Ok(GradMoments::from_samples(
            self.model.dim(),
            indices.len(),
            |i, out| {
                let k = indices[i];
                self.model
                    .loss_grad(w, self.train.row(k), self.train.targets.get(k), Some(out));
            },
        ))
    }
}

impl<T: Scalar, M: Model<T>> Objective<T> for SupervisedProblem<T, M> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn train_size(&self) -> usize {
        self.train.len()
    }

    fn initial_params(&self) -> Vec<T> {
        self.init.clone()
    }

    fn partition(&self) -> Partition {
        self.partition.clone()
    }

    fn estimate(&self, w: &[T], batch: Option<&[usize]>) -> Result<GradientEstimate<T>> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: w.len(),
            });
        }
        let moments = match batch {
            Some(idx) => {
                if idx.is_empty() {
                    return Err(Error::invalid("empty batch"));
                }
                self.batch_moments(w, idx)?
            }
            None => {
                let all: Vec<usize> = (0..self.train.len()).collect();
                self.batch_moments(w, &all)?
            }
        };
        Ok(GradientEstimate::from_moments(&moments))
    }

    fn train_loss(&self, w: &[T]) -> T {
        self.mean_loss(Split::Train, w).unwrap_or_else(T::nan)
    }

    fn test_loss(&self, w: &[T]) -> Option<T> {
        self.mean_loss(Split::Test, w)
    }

    fn val_loss(&self, w: &[T]) -> Option<T> {
        self.mean_loss(Split::Validation, w)
    }
}
