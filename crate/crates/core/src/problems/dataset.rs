use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target<T> {
    Real(T),
    Class(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Targets<T> {
    Real(Vec<T>),
    Class(Vec<usize>),
}

impl<T: Scalar> Targets<T> {
    pub fn len(&self) -> usize {
        match self {
            Targets::Real(v) => v.len(),
            Targets::Class(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Target<T> {
        match self {
            Targets::Real(v) => Target::Real(v[i]),
            Targets::Class(v) => Target::Class(v[i]),
        }
    }

    fn select(&self, idx: &[usize]) -> Self {
        match self {
            Targets::Real(v) => Targets::Real(idx.iter().map(|&i| v[i]).collect()),
            Targets::Class(v) => Targets::Class(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

/// Features, targets and a split tag per row.
#[derive(Debug, Clone)]
pub struct SupervisedDataset<T> {
    features: DenseMatrix<T>,
    targets: Targets<T>,
    splits: Vec<Split>,
}

/// Rows of one split, copied out contiguously.
#[derive(Debug, Clone)]
pub struct DataSplit<T> {
    pub features: DenseMatrix<T>,
    pub targets: Targets<T>,
}

impl<T: Scalar> DataSplit<T> {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.features.row(i)
    }
}

impl<T: Scalar> SupervisedDataset<T> {
    pub fn new(features: DenseMatrix<T>, targets: Targets<T>, splits: Vec<Split>) -> Result<Self> {
        if targets.len() != features.rows() || splits.len() != features.rows() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: targets.len().min(splits.len()),
            });
        }
        Ok(SupervisedDataset {
            features,
            targets,
            splits,
        })
    }

    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &DenseMatrix<T> {
        &self.features
    }

    pub fn targets(&self) -> &Targets<T> {
        &self.targets
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    pub fn count(&self, split: Split) -> usize {
        self.splits.iter().filter(|&&s| s == split).count()
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.splits[i] == split)
            .collect()
    }

    pub fn split(&self, split: Split) -> DataSplit<T> {
        let idx = self.indices(split);
        let cols = self.features.cols();
        let mut data = Vec::with_capacity(idx.len() * cols);
        for &i in &idx {
            data.extend_from_slice(self.features.row(i));
        }
        DataSplit {
            features: DenseMatrix::from_row_major(idx.len(), cols, data)
                .expect("row count matches"),
            targets: self.targets.select(&idx),
        }
    }
}
