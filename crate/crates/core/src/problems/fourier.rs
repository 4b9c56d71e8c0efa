use super::dataset::{Split, SupervisedDataset, Targets};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, RngStream};
use crate::scalar::Scalar;

/// `φ(x) = [1, x, sin(a_1 x), cos(a_1 x), …, sin(a_p x), cos(a_p x)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFeatures {
    pub frequencies: Vec<f64>,
}

impl FourierFeatures {
    /// Integer frequencies `1..=p`.
    pub fn integer(p: usize) -> Self {
        FourierFeatures {
            frequencies: (1..=p).map(|j| j as f64).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        2 + 2 * self.frequencies.len()
    }

    pub fn map<T: Scalar>(&self, x: f64) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim());
        out.push(T::one());
        out.push(T::lit(x));
        for &a in &self.frequencies {
            out.push(T::lit((a * x).sin()));
            out.push(T::lit((a * x).cos()));
        }
        out
    }
}

/// Noisy samples of a line `y = intercept + slope·x`, `x ~ U[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierToy {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub noise_std: f64,
    pub intercept: f64,
    pub slope: f64,
    pub n_frequencies: usize,
}

impl Default for FourierToy {
    fn default() -> Self {
        FourierToy {
            n_train: 20,
            n_val: 10,
            n_test: 1000,
            noise_std: 1.0,
            intercept: 1.0,
            slope: 2.0,
            n_frequencies: 24,
        }
    }
}

impl FourierToy {
    /// Rows are ordered train, validation, test; each sample draws `x`
    /// then its noise.
    pub fn generate<T: Scalar>(
        &self,
        rng: &mut RngStream,
    ) -> Result<(SupervisedDataset<T>, FourierFeatures)> {
        if self.n_train < 2 {
            return Err(Error::invalid("fourier toy: n_train must be at least 2"));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::invalid("fourier toy: noise_std must be nonnegative"));
        }
        let features = FourierFeatures::integer(self.n_frequencies);
        let n = self.n_train + self.n_val + self.n_test;
        let mut data = Vec::with_capacity(n * features.dim());
        let mut targets = Vec::with_capacity(n);
        let mut splits = Vec::with_capacity(n);
        for (split, count) in [
            (Split::Train, self.n_train),
            (Split::Validation, self.n_val),
            (Split::Test, self.n_test),
        ] {
            for _ in 0..count {
                let x = rng.uniform();
                let noise = self.noise_std * rng.standard_normal();
                data.extend(features.map::<T>(x));
                targets.push(T::lit(self.intercept + self.slope * x + noise));
                splits.push(split);
            }
        }
        let matrix = DenseMatrix::from_row_major(n, features.dim(), data)?;
        Ok((
            SupervisedDataset::new(matrix, Targets::Real(targets), splits)?,
            features,
        ))
    }
}

pub fn make_fourier_toy<T: Scalar>(
    n_train: usize,
    n_val: usize,
    noise_std: f64,
    rng: &mut RngStream,
) -> Result<(SupervisedDataset<T>, FourierFeatures)> {
    FourierToy {
        n_train,
        n_val,
        noise_std,
        ..FourierToy::default()
    }
    .generate(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_dimensions() {
        let mut rng = RngStream::new(1);
        let (data, phi) = make_fourier_toy::<f64>(20, 10, 1.0, &mut rng).unwrap();
        assert_eq!(phi.dim(), 50);
        assert_eq!(data.n_features(), 50);
        assert_eq!(data.count(Split::Train), 20);
        assert_eq!(data.count(Split::Validation), 10);
    }

    #[test]
    fn noiseless_targets_on_line() {
        let toy = FourierToy {
            noise_std: 0.0,
            ..FourierToy::default()
        };
        let (data, _) = toy.generate::<f64>(&mut RngStream::new(2)).unwrap();
        let Targets::Real(y) = data.targets() else {
            panic!("regression targets")
        };
        for (i, y) in y.iter().enumerate() {
            let x = data.features().row(i)[1];
            assert!((y - (1.0 + 2.0 * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_tiny_training_set() {
        assert!(make_fourier_toy::<f64>(1, 0, 1.0, &mut RngStream::new(0)).is_err());
    }
}
