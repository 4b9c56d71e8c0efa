use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Central-difference gradient of `loss` at `w`.
///
/// Coordinate `k` is `(loss(w + eps·e_k) − loss(w − eps·e_k)) / (2·eps)`.
pub fn finite_diff_gradient<T, F>(loss: F, w: &[T], eps: T) -> Result<Vec<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    if !(eps > T::zero()) {
        return Err(Error::invalid("finite_diff_gradient: eps must be positive"));
    }
    let mut probe = w.to_vec();
    let two_eps = eps + eps;
    let mut grad = Vec::with_capacity(w.len());
    for k in 0..w.len() {
        let orig = probe[k];
        probe[k] = orig + eps;
        let up = loss(&probe);
        probe[k] = orig - eps;
        let down = loss(&probe);
        probe[k] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::OracleFailure { index: k });
        }
        grad.push((up - down) / two_eps);
    }
    Ok(grad)
}

/// `‖a − b‖∞ / max(1, ‖b‖∞)`: relative error with an absolute floor.
pub fn relative_error<T: Scalar>(a: &[T], b: &[T]) -> T {
    let diff = a
        .iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()));
    let scale = b.iter().fold(T::one(), |m, &y| m.max(y.abs()));
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_squared_norm() {
        let g = finite_diff_gradient(
            |w: &[f64]| 0.5 * w.iter().map(|x| x * x).sum::<f64>(),
            &[1.0, -2.0],
            1e-6,
        )
        .unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8);
        assert!((g[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = finite_diff_gradient(|_: &[f64]| 3.0, &[0.3, 0.1, 9.0], 1e-4).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn nonfinite_loss_reports_coordinate() {
        let err = finite_diff_gradient(
            |w: &[f64]| if w[1] > 0.5 { f64::NAN } else { 0.0 },
            &[0.0, 0.5],
            1e-3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::OracleFailure { index: 1 }));
    }
}
