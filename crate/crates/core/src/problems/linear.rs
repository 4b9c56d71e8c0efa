use super::dataset::Target;
use super::supervised::Model;
use crate::scalar::{dot, Scalar};
use crate::stopping::Partition;

/// `ŷ = wᵀx` with squared loss `½(y − ŷ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeastSquares {
    pub n_features: usize,
}

impl<T: Scalar> Model<T> for LeastSquares {
    fn dim(&self) -> usize {
        self.n_features
    }

    fn input_dim(&self) -> usize {
        self.n_features
    }

    fn loss_grad(&self, w: &[T], x: &[T], y: Target<T>, grad: Option<&mut [T]>) -> T {
        let y = match y {
            Target::Real(y) => y,
            Target::Class(c) => T::from_usize_lossy(c),
        };
        let residual = dot(w, x) - y;
        if let Some(g) = grad {
            for (g, &xk) in g.iter_mut().zip(x) {
                *g = residual * xk;
            }
        }
        T::lit(0.5) * residual * residual
    }
}

/// Binary logistic regression with cross-entropy loss. Labels are `0` or `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Logistic {
    pub n_features: usize,
    /// Treat coordinate 0 (the constant feature) as its own group.
    pub split_bias: bool,
}

impl<T: Scalar> Model<T> for Logistic {
    fn dim(&self) -> usize {
        self.n_features
    }

    fn input_dim(&self) -> usize {
        self.n_features
    }

    fn partition(&self) -> Partition {
        if self.split_bias && self.n_features > 1 {
            Partition::contiguous(
                &[1, self.n_features - 1],
                vec!["bias".into(), "weights".into()],
            )
            .expect("valid sizes")
        } else {
            Partition::whole(self.n_features).expect("model has parameters")
        }
    }

    fn loss_grad(&self, w: &[T], x: &[T], y: Target<T>, grad: Option<&mut [T]>) -> T {
        let label = match y {
            Target::Real(y) => y,
            Target::Class(c) => T::from_usize_lossy(c),
        };
        logreg_loss_grad(w, x, label, grad)
    }
}

/// `log(1 + e^z)` without overflow.
pub fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Cross-entropy `−[y log σ(z) + (1−y) log(1−σ(z))]` with `z = wᵀx`,
/// evaluated as `softplus(z) − y·z`.
fn logreg_loss_grad<T: Scalar>(w: &[T], x: &[T], y: T, grad: Option<&mut [T]>) -> T {
    let z = dot(w, x);
    if let Some(g) = grad {
        let r = sigmoid(z) - y;
        for (g, &xk) in g.iter_mut().zip(x) {
            *g = r * xk;
        }
    }
    softplus(z) - y * z
}

pub fn logreg_per_sample_grad<T: Scalar>(w: &[T], x: &[T], y: T) -> (T, Vec<T>) {
    let mut g = vec![T::zero(); w.len()];
    let loss = logreg_loss_grad(w, x, y, Some(&mut g));
    (loss, g)
}

/// `[1, x_i for i, x_i·x_j for i ≤ j]`.
pub fn poly2_expand<T: Scalar>(x: &[T]) -> Vec<T> {
    let d = x.len();
    let mut out = Vec::with_capacity(1 + d + d * (d + 1) / 2);
    out.push(T::one());
    out.extend_from_slice(x);
    for i in 0..d {
        for j in i..d {
            out.push(x[i] * x[j]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly2_small_cases() {
        assert_eq!(poly2_expand(&[2.0]), vec![1.0, 2.0, 4.0]);
        assert_eq!(
            poly2_expand(&[3.0, 5.0]),
            vec![1.0, 3.0, 5.0, 9.0, 15.0, 25.0]
        );
        assert_eq!(poly2_expand(&[0.5f64; 30]).len(), 496);
    }

    #[test]
    fn logreg_at_zero_weights() {
        let x = [1.0, -2.0, 0.5];
        for y in [0.0, 1.0] {
            let (loss, g) = logreg_per_sample_grad(&[0.0; 3], &x, y);
            assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
            for (gk, xk) in g.iter().zip(&x) {
                assert_eq!(*gk, (0.5 - y) * xk);
            }
        }
    }

    #[test]
    fn logreg_saturates_without_overflow() {
        let (loss, g) = logreg_per_sample_grad(&[1.0], &[800.0], 1.0);
        assert_eq!(loss, 0.0);
        assert_eq!(g[0], 0.0);
        let (loss, g) = logreg_per_sample_grad(&[1.0], &[-800.0], 1.0);
        assert_eq!(loss, 800.0);
        assert_eq!(g[0], 800.0);
    }

    #[test]
    fn least_squares_residual() {
        let mut g = [0.0; 2];
        let loss = LeastSquares { n_features: 2 }.loss_grad(
            &[1.0, 1.0],
            &[1.0, 2.0],
            Target::Real(1.0),
            Some(&mut g),
        );
        assert_eq!(loss, 2.0);
        assert_eq!(g, [2.0, 4.0]);
    }
}
