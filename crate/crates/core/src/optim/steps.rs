use crate::error::{Error, Result};
use crate::grad_stats::GradMoments;
use crate::problems::{Model, SupervisedProblem};
use crate::scalar::Scalar;
use crate::stopping::ElementMask;

fn check_dims(w: usize, other: usize) -> Result<()> {
    if w != other {
        return Err(Error::DimensionMismatch {
            expected: w,
            got: other,
        });
    }
    Ok(())
}

/// `w − α·grad`.
pub fn gd_step<T: Scalar>(w: &[T], grad: &[T], lr: T) -> Result<Vec<T>> {
    check_dims(w.len(), grad.len())?;
    Ok(w.iter().zip(grad).map(|(&w, &g)| w - lr * g).collect())
}

/// One mini-batch step. Per-sample gradients of `batch` are accumulated into
/// `moments_out` (which is reset first) and the step uses their mean.
pub fn sgd_step<T: Scalar, M: Model<T>>(
    w: &[T],
    batch: &[usize],
    problem: &SupervisedProblem<T, M>,
    lr: T,
    moments_out: &mut GradMoments<T>,
) -> Result<Vec<T>> {
    if batch.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    *moments_out = problem.batch_moments(w, batch)?;
    gd_step(w, moments_out.mean(), lr)
}

/// `v' = γv + (1−γ)·grad²`, `w' = w − α·grad / (√v' + ε)`.
///
/// Coordinates with `√v' + ε = 0` (zero gradient history, `ε = 0`) are left
/// unchanged.
pub fn rmsprop_step<T: Scalar>(
    w: &[T],
    grad: &[T],
    v: &[T],
    lr: T,
    gamma: T,
    eps: T,
) -> Result<(Vec<T>, Vec<T>)> {
    check_dims(w.len(), grad.len())?;
    check_dims(w.len(), v.len())?;
    if let Some(index) = v.iter().position(|&x| !(x >= T::zero())) {
        return Err(Error::InvalidVariance {
            index,
            value: v[index].to_f64_lossy(),
        });
    }
    let mut w_new = Vec::with_capacity(w.len());
    let mut v_new = Vec::with_capacity(w.len());
    for ((&wk, &gk), &vk) in w.iter().zip(grad).zip(v) {
        let vn = gamma * vk + (T::one() - gamma) * gk * gk;
        let denom = vn.sqrt() + eps;
        w_new.push(if denom > T::zero() {
            wk - lr * (gk / denom)
        } else {
            wk
        });
        v_new.push(vn);
    }
    Ok((w_new, v_new))
}

/// Gradient step on active coordinates only; inactive ones keep their value.
pub fn masked_sgd_step<T: Scalar>(
    w: &[T],
    grad: &[T],
    mask: &ElementMask<T>,
    lr: T,
) -> Result<Vec<T>> {
    check_dims(w.len(), grad.len())?;
    check_dims(w.len(), mask.dim())?;
    Ok(w.iter()
        .zip(grad)
        .zip(mask.active())
        .map(|((&w, &g), &on)| if on { w - lr * g } else { w })
        .collect())
}
