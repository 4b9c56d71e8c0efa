//! Per-coordinate gradient moments, EMA smoothing and signal-to-noise fractions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Variances below this are treated as exactly zero.
pub const ZERO_VARIANCE: f64 = 1e-300;

/// Fraction assigned to a coordinate whose variance vanished but whose mean
/// gradient did not.
pub const NOISELESS_SNR: f64 = 1e30;

/// Samples per leaf of the fixed reduction tree used by [`GradMoments::from_samples`].
pub const MERGE_LEAF: usize = 32;

/// Streaming mean and sum of squared deviations of per-sample gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct GradMoments<T> {
    count: usize,
    mean: Vec<T>,
    m2: Vec<T>,
}

impl<T: Scalar> GradMoments<T> {
    pub fn new(dim: usize) -> Self {
        GradMoments {
            count: 0,
            mean: vec![T::zero(); dim],
            m2: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn reset(&mut self) {
        self.count = 0;
        self.mean.iter_mut().for_each(|v| *v = T::zero());
        self.m2.iter_mut().for_each(|v| *v = T::zero());
    }

    /// Welford update with one per-sample gradient.
    pub fn accumulate(&mut self, sample_grad: &[T]) -> Result<()> {
        if sample_grad.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: sample_grad.len(),
            });
        }
        self.count += 1;
        let n = T::from_usize_lossy(self.count);
        for ((m, s), &g) in self
            .mean
            .iter_mut()
            .zip(self.m2.iter_mut())
            .zip(sample_grad)
        {
            let delta = g - *m;
            *m = *m + delta / n;
            *s = *s + delta * (g - *m);
        }
        Ok(())
    }

    /// Pairwise combination of two partial accumulators (Chan et al.).
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if other.count == 0 {
            return Ok(self.clone());
        }
        if self.count == 0 {
            return Ok(other.clone());
        }
        let na = T::from_usize_lossy(self.count);
        let nb = T::from_usize_lossy(other.count);
        let n = na + nb;
        let mut out = GradMoments::new(self.dim());
        out.count = self.count + other.count;
        for k in 0..self.dim() {
            let delta = other.mean[k] - self.mean[k];
            out.mean[k] = self.mean[k] + delta * nb / n;
            out.m2[k] = self.m2[k] + other.m2[k] + delta * delta * na * nb / n;
        }
        Ok(out)
    }

    /// `(∇L_S, Σ̂)`: mean gradient and unbiased per-coordinate variance.
    pub fn finalize(&self) -> Result<(Vec<T>, Vec<T>)> {
        if self.count < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                have: self.count,
            });
        }
        let denom = T::from_usize_lossy(self.count - 1);
        let var = self
            .m2
            .iter()
            .map(|&s| (s / denom).max(T::zero()))
            .collect();
        Ok((self.mean.clone(), var))
    }

    /// Moments of `n` per-sample gradients produced by `sample(i, out)`.
    ///
    /// Samples are grouped into leaves of [`MERGE_LEAF`] consecutive indices,
    /// each accumulated sequentially, and leaves are merged along a fixed
    /// balanced binary tree. The result is therefore bit-identical whatever
    /// the number of worker threads.
    pub fn from_samples<F>(dim: usize, n: usize, sample: F) -> Self
    where
        F: Fn(usize, &mut [T]) + Sync,
    {
        let leaves: Vec<GradMoments<T>> = (0..n.div_ceil(MERGE_LEAF))
            .into_par_iter()
            .map(|leaf| {
                let mut acc = GradMoments::new(dim);
                let mut buf = vec![T::zero(); dim];
                let end = ((leaf + 1) * MERGE_LEAF).min(n);
                for i in leaf * MERGE_LEAF..end {
                    buf.iter_mut().for_each(|v| *v = T::zero());
                    sample(i, &mut buf);
                    acc.accumulate(&buf).expect("buffer has moment dimension");
                }
                acc
            })
            .collect();
        merge_tree(leaves).unwrap_or_else(|| GradMoments::new(dim))
    }
}

fn merge_tree<T: Scalar>(mut level: Vec<GradMoments<T>>) -> Option<GradMoments<T>> {
    while level.len() > 1 {
        level = level
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => a.merge(b).expect("equal dimensions"),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    level.pop()
}

/// Exponential moving average `value ← β·value + (1−β)·x`, started from a
/// warm-up value instead of bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmaSmoother<T> {
    beta: T,
    init: T,
    value: Vec<T>,
    updates: usize,
}

impl<T: Scalar> EmaSmoother<T> {
    pub fn new(dim: usize, beta: T, init: T) -> Result<Self> {
        if !(beta >= T::zero() && beta < T::one()) {
            return Err(Error::invalid(format!(
                "EMA beta must lie in [0, 1), got {beta}"
            )));
        }
        Ok(EmaSmoother {
            beta,
            init,
            value: vec![init; dim],
            updates: 0,
        })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn init(&self) -> T {
        self.init
    }

    pub fn value(&self) -> &[T] {
        &self.value
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn update(&mut self, x: &[T]) -> Result<()> {
        if x.len() != self.value.len() {
            return Err(Error::DimensionMismatch {
                expected: self.value.len(),
                got: x.len(),
            });
        }
        let b = self.beta;
        let a = T::one() - b;
        for (v, &xi) in self.value.iter_mut().zip(x) {
            *v = b * *v + a * xi;
        }
        self.updates += 1;
        Ok(())
    }

    /// Number of updates with a constant input `x` needed before the value
    /// first crosses `level`, or `None` if it never does.
    pub fn crossing_steps(beta: f64, init: f64, x: f64, level: f64) -> Option<usize> {
        if (init - level) * (x - level) > 0.0 || x == level {
            return if init == level { Some(0) } else { None };
        }
        if beta == 0.0 {
            return Some(1);
        }
        // level = x + (init − x)·βᵗ
        let t = ((level - x) / (init - x)).ln() / beta.ln();
        Some(t.ceil().max(0.0) as usize)
    }
}

/// `f_k = n·g_k² / Σ̂_k`, elementwise.
///
/// Coordinates with vanishing variance map to 0 when the mean gradient is
/// also zero and to [`NOISELESS_SNR`] otherwise.
pub fn snr_fractions<T: Scalar>(mean_grad: &[T], var_hat: &[T], sample_size: usize) -> Vec<T> {
    debug_assert_eq!(mean_grad.len(), var_hat.len());
    let n = T::from_usize_lossy(sample_size);
    let tiny = T::lit(ZERO_VARIANCE);
    mean_grad
        .iter()
        .zip(var_hat)
        .map(|(&g, &v)| {
            if v < tiny {
                if g == T::zero() {
                    T::zero()
                } else {
                    T::lit(NOISELESS_SNR)
                }
            } else {
                n * g * g / v
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_samples() {
        let mut m = GradMoments::new(1);
        m.accumulate(&[1.0]).unwrap();
        m.accumulate(&[3.0]).unwrap();
        let (mean, var) = m.finalize().unwrap();
        assert_eq!(mean, vec![2.0]);
        assert_eq!(var, vec![2.0]);
    }

    #[test]
    fn single_sample_is_insufficient() {
        let mut m = GradMoments::new(2);
        assert!(matches!(
            m.finalize(),
            Err(Error::InsufficientSamples { have: 0, .. })
        ));
        m.accumulate(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            m.finalize(),
            Err(Error::InsufficientSamples { have: 1, .. })
        ));
    }

    #[test]
    fn constant_samples_have_zero_variance() {
        let mut m = GradMoments::new(3);
        for _ in 0..7 {
            m.accumulate(&[0.25, -1.5, 4.0]).unwrap();
        }
        let (mean, var) = m.finalize().unwrap();
        assert_eq!(mean, vec![0.25, -1.5, 4.0]);
        assert_eq!(var, vec![0.0; 3]);
    }

    #[test]
    fn dimension_mismatch() {
        let mut m = GradMoments::<f64>::new(2);
        assert!(matches!(
            m.accumulate(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(m.merge(&GradMoments::new(3)).is_err());
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..37)
            .map(|i| ((i * 7919) % 101) as f64 * 0.1 - 3.0)
            .collect();
        let mut seq = GradMoments::new(1);
        xs.iter().for_each(|&x| seq.accumulate(&[x]).unwrap());
        let tree = GradMoments::from_samples(1, xs.len(), |i, out| out[0] = xs[i]);
        let (m1, v1) = seq.finalize().unwrap();
        let (m2, v2) = tree.finalize().unwrap();
        assert!((m1[0] - m2[0]).abs() <= 1e-12 * m1[0].abs().max(1.0));
        assert!((v1[0] - v2[0]).abs() <= 1e-12 * v1[0]);
    }

    #[test]
    fn from_samples_is_thread_count_independent() {
        let xs: Vec<f64> = (0..200).map(|i| (i as f64).sin() * 3.0).collect();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| GradMoments::from_samples(1, xs.len(), |i, o| o[0] = xs[i]))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn snr_examples() {
        assert_eq!(snr_fractions(&[0.0, 0.0], &[1.0, 2.0], 5), vec![0.0, 0.0]);
        let f = snr_fractions(&[0.1f64, 0.2], &[1.0, 1.0], 4);
        assert!((f[0] - 0.04).abs() < 1e-15);
        assert!((f[1] - 0.16).abs() < 1e-15);
    }

    #[test]
    fn snr_boundary_is_one() {
        let m = 8usize;
        let var = [0.5, 2.0, 7.0];
        let g: Vec<f64> = var.iter().map(|v| (v / m as f64).sqrt()).collect();
        for f in snr_fractions(&g, &var, m) {
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn snr_zero_variance_rule() {
        let f = snr_fractions(&[0.0, 0.3], &[0.0, 0.0], 10);
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], NOISELESS_SNR);
    }

    #[test]
    fn ema_beta_zero_tracks_input() {
        let mut e = EmaSmoother::new(2, 0.0, 10.0).unwrap();
        e.update(&[0.3, -4.0]).unwrap();
        assert_eq!(e.value(), &[0.3, -4.0]);
    }

    #[test]
    fn ema_rejects_bad_beta() {
        assert!(EmaSmoother::new(1, 1.0, 0.0).is_err());
        assert!(EmaSmoother::new(1, -0.1, 0.0).is_err());
    }

    #[test]
    fn ema_crossing_closed_form() {
        assert_eq!(
            EmaSmoother::<f64>::crossing_steps(0.9, -9.0, -1.0, 0.0),
            None
        );
        let t = EmaSmoother::<f64>::crossing_steps(0.5, -1.0, 1.0, 0.0).unwrap();
        // -1 → 0 after one update exactly
        assert_eq!(t, 1);
    }
}
