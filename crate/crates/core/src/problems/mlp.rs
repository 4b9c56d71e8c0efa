use super::dataset::{Split, SupervisedDataset, Target, Targets};
use super::supervised::Model;
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, RngStream};
use crate::scalar::Scalar;
use crate::stopping::Partition;

/// Fully connected network with ReLU hidden layers and a softmax output.
///
/// Parameters are laid out layer by layer as `W_l` (row-major,
/// `out × in`) followed by `b_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpArchitecture {
    widths: Vec<usize>,
}

impl MlpArchitecture {
    /// `widths = [input, hidden…, classes]`.
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::invalid("mlp needs at least input and output widths"));
        }
        if widths.contains(&0) {
            return Err(Error::invalid("mlp layer widths must be positive"));
        }
        if *widths.last().expect("nonempty") < 2 {
            return Err(Error::invalid("mlp needs at least two classes"));
        }
        Ok(MlpArchitecture { widths })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn classes(&self) -> usize {
        self.widths[self.widths.len() - 1]
    }

    pub fn n_params(&self) -> usize {
        self.widths.windows(2).map(|p| p[1] * (p[0] + 1)).sum()
    }

    /// One group per weight matrix and per bias vector.
    pub fn partition(&self) -> Partition {
        let mut sizes = Vec::with_capacity(2 * self.layers());
        let mut names = Vec::with_capacity(2 * self.layers());
        for (l, p) in self.widths.windows(2).enumerate() {
            sizes.push(p[0] * p[1]);
            names.push(format!("W{l}"));
            sizes.push(p[1]);
            names.push(format!("b{l}"));
        }
        Partition::contiguous(&sizes, names).expect("positive sizes")
    }

    /// He-normal weights, zero biases.
    pub fn he_init<T: Scalar>(&self, rng: &mut RngStream) -> Vec<T> {
        let mut params = Vec::with_capacity(self.n_params());
        for p in self.widths.windows(2) {
            let std = (2.0 / p[0] as f64).sqrt();
            params.extend((0..p[0] * p[1]).map(|_| T::lit(std * rng.standard_normal())));
            params.extend(std::iter::repeat_n(T::zero(), p[1]));
        }
        params
    }

    fn offsets(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.layers());
        let mut at = 0;
        for p in self.widths.windows(2) {
            out.push((at, at + p[0] * p[1]));
            at += p[1] * (p[0] + 1);
        }
        out
    }

    /// Softmax cross-entropy of one sample; `grad` is overwritten when given.
    pub fn loss_grad<T: Scalar>(
        &self,
        params: &[T],
        x: &[T],
        class: usize,
        grad: Option<&mut [T]>,
    ) -> T {
        debug_assert_eq!(params.len(), self.n_params());
        debug_assert_eq!(x.len(), self.input_dim());
        let offsets = self.offsets();
        // acts[l] is the input of layer l; the last entry holds the logits.
        let mut acts: Vec<Vec<T>> = Vec::with_capacity(self.layers() + 1);
        acts.push(x.to_vec());
        for (l, p) in self.widths.windows(2).enumerate() {
            let (n_in, n_out) = (p[0], p[1]);
            let (w_at, b_at) = offsets[l];
            let input = &acts[l];
            let last = l + 1 == self.layers();
            let out: Vec<T> = (0..n_out)
                .map(|j| {
                    let row = &params[w_at + j * n_in..w_at + (j + 1) * n_in];
                    let z = row
                        .iter()
                        .zip(input)
                        .fold(params[b_at + j], |acc, (&w, &h)| acc + w * h);
                    if last {
                        z
                    } else {
                        z.max(T::zero())
                    }
                })
                .collect();
            acts.push(out);
        }
        let logits = &acts[self.layers()];
        let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
        let total: T = exps.iter().copied().sum();
        let loss = total.ln() + max - logits[class];

        if let Some(grad) = grad {
            let mut delta: Vec<T> = exps.iter().map(|&e| e / total).collect();
            delta[class] = delta[class] - T::one();
            for l in (0..self.layers()).rev() {
                let (n_in, n_out) = (self.widths[l], self.widths[l + 1]);
                let (w_at, b_at) = offsets[l];
                let input = &acts[l];
                for j in 0..n_out {
                    let row = &mut grad[w_at + j * n_in..w_at + (j + 1) * n_in];
                    for (g, &h) in row.iter_mut().zip(input) {
                        *g = delta[j] * h;
                    }
                    grad[b_at + j] = delta[j];
                }
                if l > 0 {
                    // ReLU derivative from the stored activation (zero iff z ≤ 0).
                    delta = (0..n_in)
                        .map(|i| {
                            if input[i] > T::zero() {
                                (0..n_out).fold(T::zero(), |acc, j| {
                                    acc + params[w_at + j * n_in + i] * delta[j]
                                })
                            } else {
                                T::zero()
                            }
                        })
                        .collect();
                }
            }
        }
        loss
    }
}

impl<T: Scalar> Model<T> for MlpArchitecture {
    fn dim(&self) -> usize {
        self.n_params()
    }

    fn input_dim(&self) -> usize {
        self.widths[0]
    }

    fn partition(&self) -> Partition {
        MlpArchitecture::partition(self)
    }

    fn loss_grad(&self, w: &[T], x: &[T], y: Target<T>, grad: Option<&mut [T]>) -> T {
        let class = match y {
            Target::Class(c) => c,
            Target::Real(v) => v.to_f64_lossy() as usize,
        };
        MlpArchitecture::loss_grad(self, w, x, class, grad)
    }
}

pub fn mlp_forward_backward<T: Scalar>(
    arch: &MlpArchitecture,
    params: &[T],
    x: &[T],
    class: usize,
) -> (T, Vec<T>) {
    let mut grad = vec![T::zero(); params.len()];
    let loss = arch.loss_grad(params, x, class, Some(&mut grad));
    (loss, grad)
}

/// Gaussian class clusters. Centers are drawn as `N(0, separation²)` in the
/// first `n_informative` coordinates and are zero in the rest, so the
/// remaining coordinates carry no signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Blobs {
    pub n_features: usize,
    pub n_informative: usize,
    pub n_classes: usize,
    pub separation: f64,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
}

impl Default for Blobs {
    fn default() -> Self {
        Blobs {
            n_features: 20,
            n_informative: 10,
            n_classes: 3,
            separation: 0.7,
            n_train: 1000,
            n_val: 0,
            n_test: 2000,
        }
    }
}

impl Blobs {
    pub fn generate<T: Scalar>(&self, rng: &mut RngStream) -> Result<SupervisedDataset<T>> {
        if self.n_features == 0 || self.n_informative > self.n_features {
            return Err(Error::invalid(
                "blobs: need 0 < n_features and n_informative <= n_features",
            ));
        }
        if self.n_classes < 2 || self.n_train == 0 {
            return Err(Error::invalid("blobs: need two classes and training rows"));
        }
        let d = self.n_features;
        let mut centers = vec![0.0; self.n_classes * d];
        for c in 0..self.n_classes {
            for k in 0..self.n_informative {
                centers[c * d + k] = self.separation * rng.standard_normal();
            }
        }
        let n = self.n_train + self.n_val + self.n_test;
        let mut data = Vec::with_capacity(n * d);
        let mut labels = Vec::with_capacity(n);
        let mut splits = Vec::with_capacity(n);
        for (split, count) in [
            (Split::Train, self.n_train),
            (Split::Validation, self.n_val),
            (Split::Test, self.n_test),
        ] {
            for _ in 0..count {
                let c = rng.below(self.n_classes);
                data.extend(
                    centers[c * d..(c + 1) * d]
                        .iter()
                        .map(|&m| T::lit(m + rng.standard_normal())),
                );
                labels.push(c);
                splits.push(split);
            }
        }
        let matrix = DenseMatrix::from_row_major(n, d, data)?;
        SupervisedDataset::new(matrix, Targets::Class(labels), splits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let arch = MlpArchitecture::new(vec![8, 16, 8, 3]).unwrap();
        let p = arch.partition();
        assert_eq!(p.len(), 6);
        assert_eq!(p.dim(), arch.n_params());
        assert_eq!(arch.n_params(), 8 * 16 + 16 + 16 * 8 + 8 + 8 * 3 + 3);
    }

    #[test]
    fn zero_output_layer_gives_log_k() {
        let arch = MlpArchitecture::new(vec![4, 5, 3]).unwrap();
        let mut params: Vec<f64> = arch.he_init(&mut RngStream::new(1));
        let out_start = 4 * 5 + 5;
        params[out_start..].iter_mut().for_each(|p| *p = 0.0);
        let (loss, _) = mlp_forward_backward(&arch, &params, &[1.0, -1.0, 0.5, 2.0], 2);
        assert!((loss - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(MlpArchitecture::new(vec![3]).is_err());
        assert!(MlpArchitecture::new(vec![3, 0, 2]).is_err());
        assert!(MlpArchitecture::new(vec![3, 1]).is_err());
    }

    #[test]
    fn blobs_noise_dims_have_zero_centers() {
        let blobs = Blobs {
            n_train: 3000,
            n_test: 0,
            ..Blobs::default()
        };
        let data: SupervisedDataset<f64> = blobs.generate(&mut RngStream::new(4)).unwrap();
        let x = data.features();
        let mean_last: f64 = (0..x.rows()).map(|i| x.row(i)[19]).sum::<f64>() / x.rows() as f64;
        assert!(mean_last.abs() < 0.1);
    }
}
