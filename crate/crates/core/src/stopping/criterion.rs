use std::f64::consts::PI;

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::grad_stats::snr_fractions;
use crate::scalar::Scalar;

fn check_variance<T: Scalar>(var_hat: &[T]) -> Result<()> {
    match var_hat
        .iter()
        .position(|&v| !(v > T::zero()) || !v.is_finite())
    {
        Some(index) => Err(Error::InvalidVariance {
            index,
            value: var_hat[index].to_f64_lossy(),
        }),
        None => Ok(()),
    }
}

fn check_lengths<T>(grad: &[T], var_hat: &[T]) -> Result<()> {
    if grad.len() != var_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: grad.len(),
            got: var_hat.len(),
        });
    }
    Ok(())
}

/// Log-density of `grad` under the factorized zero-mean Gaussian with
/// per-coordinate variance `var_hat / dataset_size`.
pub fn log_evidence<T: Scalar>(grad: &[T], var_hat: &[T], dataset_size: usize) -> Result<T> {
    check_lengths(grad, var_hat)?;
    check_variance(var_hat)?;
    let m = T::from_usize_lossy(dataset_size);
    let half = T::lit(0.5);
    let two_pi = T::lit(2.0 * PI);
    Ok(grad
        .iter()
        .zip(var_hat)
        .map(|(&g, &v)| {
            let s2 = v / m;
            -half * (two_pi * s2).ln() - half * g * g / s2
        })
        .sum())
}

/// Expectation of [`log_evidence`] when `grad` is itself drawn from the
/// model: the negative differential entropy `Σ_k −½·log(2π·v_k/M) − ½`.
pub fn expected_log_evidence<T: Scalar>(var_hat: &[T], dataset_size: usize) -> Result<T> {
    check_variance(var_hat)?;
    let m = T::from_usize_lossy(dataset_size);
    let half = T::lit(0.5);
    let two_pi = T::lit(2.0 * PI);
    Ok(var_hat
        .iter()
        .map(|&v| -half * (two_pi * v / m).ln() - half)
        .sum())
}

/// `1 − (n/D)·Σ_k grad_k²/var_k`, computed as `1 − mean(f)` with the
/// signal-to-noise fractions `f`. Positive values mean the gradient is
/// indistinguishable from sampling noise.
pub fn eb_criterion<T: Scalar>(
    grad: &[T],
    var_hat: &[T],
    effective_size: usize,
    dim: usize,
) -> Result<T> {
    check_lengths(grad, var_hat)?;
    if dim != grad.len() || dim == 0 {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: grad.len(),
        });
    }
    check_variance(var_hat)?;
    let f = snr_fractions(grad, var_hat, effective_size);
    Ok(criterion_from_fractions(&f))
}

/// `1 − mean(f)`.
pub fn criterion_from_fractions<T: Scalar>(f: &[T]) -> T {
    let sum: T = f.iter().copied().sum();
    T::one() - sum / T::from_usize_lossy(f.len())
}

/// Per-group criterion values and their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedCriterion<T> {
    pub per_group: Vec<T>,
    pub combined: T,
}

pub fn eb_criterion_grouped<T: Scalar>(
    grad: &[T],
    var_hat: &[T],
    effective_size: usize,
    partition: &Partition,
) -> Result<GroupedCriterion<T>> {
    check_lengths(grad, var_hat)?;
    partition.check_dim(grad.len())?;
    check_variance(var_hat)?;
    let f = snr_fractions(grad, var_hat, effective_size);
    grouped_from_fractions(&f, partition)
}

/// Grouped criterion from precomputed fractions. Zero-variance coordinates
/// are allowed here; they were already resolved by [`snr_fractions`].
pub fn grouped_from_fractions<T: Scalar>(
    f: &[T],
    partition: &Partition,
) -> Result<GroupedCriterion<T>> {
    partition.check_dim(f.len())?;
    let mut scratch = Vec::new();
    let per_group: Vec<T> = partition
        .groups()
        .iter()
        .map(|group| {
            scratch.clear();
            scratch.extend(group.iter().map(|&k| f[k]));
            criterion_from_fractions(&scratch)
        })
        .collect();
    let combined = per_group.iter().copied().sum::<T>() / T::from_usize_lossy(per_group.len());
    Ok(GroupedCriterion {
        per_group,
        combined,
    })
}

/// Fraction of coordinates whose relative RMSprop step `z_k / max z` (with
/// `z = 1/√v`) falls below `threshold`.
pub fn off_fraction_rmsprop<T: Scalar>(v: &[T], threshold: T) -> Result<T> {
    if v.is_empty() {
        return Err(Error::invalid("off_fraction_rmsprop: empty vector"));
    }
    if let Some(index) = v.iter().position(|&x| !(x > T::zero())) {
        return Err(Error::InvalidVariance {
            index,
            value: v[index].to_f64_lossy(),
        });
    }
    let z: Vec<T> = v.iter().map(|&x| T::one() / x.sqrt()).collect();
    let zmax = z.iter().fold(T::zero(), |a, &b| a.max(b));
    let below = z.iter().filter(|&&zk| zk / zmax < threshold).count();
    Ok(T::from_usize_lossy(below) / T::from_usize_lossy(v.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchored_values() {
        assert_eq!(eb_criterion(&[0.0, 0.0], &[1.0, 3.0], 10, 2).unwrap(), 1.0);
        let c = eb_criterion(&[0.1f64, 0.2], &[1.0, 1.0], 4, 2).unwrap();
        assert!((c - 0.9).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_variance() {
        assert!(matches!(
            eb_criterion(&[0.1, 0.2], &[1.0, 0.0], 4, 2),
            Err(Error::InvalidVariance { index: 1, .. })
        ));
        assert!(log_evidence(&[0.0], &[-1.0], 1).is_err());
    }

    #[test]
    fn rejects_dim_mismatch() {
        assert!(eb_criterion(&[0.1, 0.2], &[1.0, 1.0], 4, 3).is_err());
        assert!(eb_criterion(&[0.1], &[1.0, 1.0], 4, 1).is_err());
        let p = Partition::whole(3).unwrap();
        assert!(eb_criterion_grouped(&[0.1, 0.2], &[1.0, 1.0], 4, &p).is_err());
    }

    #[test]
    fn log_evidence_standard_normal() {
        let half_log_2pi = 0.5 * (2.0 * PI).ln();
        assert!((log_evidence(&[0.0], &[1.0], 1).unwrap() + half_log_2pi).abs() < 1e-15);
        assert!((log_evidence(&[1.0], &[1.0], 1).unwrap() + half_log_2pi + 0.5).abs() < 1e-15);
    }

    #[test]
    fn doubling_dataset_adds_half_log_two_per_coordinate() {
        let v = [0.7, 2.0, 5.0];
        let a = log_evidence(&[0.0; 3], &v, 6).unwrap();
        let b = log_evidence(&[0.0; 3], &v, 12).unwrap();
        assert!((b - a - 1.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn grouping_weights_groups_equally() {
        // group 0 (two coords) at criterion +1, group 1 (one coord) at −1
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let g = [0.0, 0.0, 2f64.sqrt()];
        let out = eb_criterion_grouped(&g, &[1.0, 1.0, 1.0], 1, &p).unwrap();
        assert!((out.per_group[0] - 1.0).abs() < 1e-15);
        assert!((out.per_group[1] + 1.0).abs() < 1e-15);
        assert!(out.combined.abs() < 1e-15);
    }

    #[test]
    fn rmsprop_fraction_examples() {
        assert_eq!(off_fraction_rmsprop(&[1.0, 1e4], 0.1).unwrap(), 0.5);
        assert_eq!(off_fraction_rmsprop(&[3.0; 5], 0.999).unwrap(), 0.0);
        assert_eq!(off_fraction_rmsprop(&[1.0, 1e4, 1e8], 1e-300).unwrap(), 0.0);
        assert!(off_fraction_rmsprop(&[1.0, 0.0], 0.5).is_err());
    }
}
