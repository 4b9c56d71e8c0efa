use super::objective::{GradientEstimate, Losses, Objective};
use crate::error::{Error, Result};
use crate::numerics::{gaussian_vector, haar_orthogonal, DenseMatrix, RngStream};
use crate::scalar::{dot, Scalar};
use crate::stopping::Partition;

/// Eigenvalue profile of the quadratic's Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumKind {
    /// Evenly spaced between `min` and `max`.
    Uniform { min: f64, max: f64 },
    /// Geometric sequence from `min` to `max`.
    Exponential { min: f64, max: f64 },
    /// `n_large` eigenvalues equal to `large`, the rest equal to `small`.
    Structured {
        small: f64,
        large: f64,
        n_large: usize,
    },
}

impl SpectrumKind {
    /// Sorted ascending, all positive.
    pub fn eigenvalues(&self, dim: usize) -> Result<Vec<f64>> {
        if dim == 0 {
            return Err(Error::invalid("spectrum: dim must be positive"));
        }
        let step = |i: usize| {
            if dim == 1 {
                0.0
            } else {
                i as f64 / (dim - 1) as f64
            }
        };
        match *self {
            SpectrumKind::Uniform { min, max } => {
                check_range(min, max)?;
                Ok((0..dim)
                    .map(|i| {
                        if i + 1 == dim && dim > 1 {
                            max
                        } else {
                            min + (max - min) * step(i)
                        }
                    })
                    .collect())
            }
            SpectrumKind::Exponential { min, max } => {
                check_range(min, max)?;
                let ratio = (max / min).ln();
                Ok((0..dim)
                    .map(|i| {
                        if i + 1 == dim && dim > 1 {
                            max
                        } else {
                            min * (ratio * step(i)).exp()
                        }
                    })
                    .collect())
            }
            SpectrumKind::Structured {
                small,
                large,
                n_large,
            } => {
                check_range(small, large)?;
                if n_large > dim {
                    return Err(Error::invalid(format!(
                        "structured spectrum: {n_large} large eigenvalues exceed dim {dim}"
                    )));
                }
                Ok((0..dim)
                    .map(|i| if i >= dim - n_large { large } else { small })
                    .collect())
            }
        }
    }
}

fn check_range(min: f64, max: f64) -> Result<()> {
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(Error::invalid(format!(
            "spectrum range must satisfy 0 < min <= max, got [{min}, {max}]"
        )));
    }
    Ok(())
}

/// Where gradient descent starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticInit {
    /// `w0 = w*`.
    AtOptimum,
    /// `w0 = w* + N(0, variance·I)`.
    Gaussian { variance: f64 },
    /// `w0 = w* − factor·ζ`; with `factor > 1` the empirical minimizer lies
    /// between the start and the true minimizer.
    Counterexample { factor: f64 },
}

/// `L(w) = ½(w−w*)ᵀB(w−w*)` and its sampled counterpart
/// `L_D(w) = ½(w−w*+ζ)ᵀB(w−w*+ζ)` with `B = R·diag(γ)·Rᵀ`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem<T> {
    rotation: DenseMatrix<T>,
    eigenvalues: Vec<T>,
    hessian: DenseMatrix<T>,
    w_star: Vec<T>,
    zeta: Vec<T>,
    noise_scale: T,
    noise_diag: Vec<T>,
    b_zeta: Vec<T>,
    init: Vec<T>,
}

/// Everything [`QuadraticProblem::evaluate`] computes from one product with `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadEval<T> {
    pub true_loss: T,
    pub emp_loss: T,
    pub true_grad: Vec<T>,
    pub emp_grad: Vec<T>,
}

/// Random problem with `w* = 0`, noise covariance `lambda_scale·I` and
/// start at the optimum; see [`QuadraticProblem::with_init`].
pub fn make_quadratic<T: Scalar>(
    dim: usize,
    spectrum: SpectrumKind,
    lambda_scale: f64,
    rng: &mut RngStream,
) -> Result<QuadraticProblem<T>> {
    let rotation = haar_orthogonal::<T>(dim, rng)?;
    let eigenvalues: Vec<T> = spectrum.eigenvalues(dim)?.into_iter().map(T::lit).collect();
    let w_star = vec![T::zero(); dim];
    QuadraticProblem::from_parts(rotation, eigenvalues, w_star, lambda_scale, rng)
}

impl<T: Scalar> QuadraticProblem<T> {
    /// Builds `B = R·diag(γ)·Rᵀ` and draws `ζ ~ N(0, lambda_scale·I)` once.
    pub fn from_parts(
        rotation: DenseMatrix<T>,
        eigenvalues: Vec<T>,
        w_star: Vec<T>,
        lambda_scale: f64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let dim = eigenvalues.len();
        if rotation.rows() != dim || rotation.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rotation.rows(),
            });
        }
        if w_star.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: w_star.len(),
            });
        }
        if let Some(index) = eigenvalues.iter().position(|&g| !(g > T::zero())) {
            return Err(Error::invalid(format!(
                "eigenvalue {index} is not positive"
            )));
        }
        if !(lambda_scale > 0.0 && lambda_scale.is_finite()) {
            return Err(Error::invalid("lambda_scale must be positive"));
        }
        let hessian = rotation.congruence_diag(&eigenvalues)?;
        let noise_scale = T::lit(lambda_scale);
        let zeta = gaussian_vector(dim, T::zero(), T::lit(lambda_scale.sqrt()), rng)?;
        // diag(BΛBᵀ) = λ·Σ_j B_kj² for Λ = λI.
        let noise_diag = (0..dim)
            .map(|k| noise_scale * hessian.row(k).iter().map(|&b| b * b).sum::<T>())
            .collect();
        let b_zeta = hessian.matvec(&zeta)?;
        let init = w_star.clone();
        Ok(QuadraticProblem {
            rotation,
            eigenvalues,
            hessian,
            w_star,
            zeta,
            noise_scale,
            noise_diag,
            b_zeta,
            init,
        })
    }

    /// Sets the starting point. Gaussian draws come from `rng`.
    pub fn with_init(mut self, init: QuadraticInit, rng: &mut RngStream) -> Result<Self> {
        self.init = match init {
            QuadraticInit::AtOptimum => self.w_star.clone(),
            QuadraticInit::Gaussian { variance } => {
                if !(variance >= 0.0) {
                    return Err(Error::invalid("init variance must be nonnegative"));
                }
                let noise = gaussian_vector(self.dim(), T::zero(), T::lit(variance.sqrt()), rng)?;
                self.w_star.iter().zip(noise).map(|(&w, n)| w + n).collect()
            }
            QuadraticInit::Counterexample { factor } => {
                let c = T::lit(factor);
                self.w_star
                    .iter()
                    .zip(&self.zeta)
                    .map(|(&w, &z)| w - c * z)
                    .collect()
            }
        };
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn rotation(&self) -> &DenseMatrix<T> {
        &self.rotation
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn hessian(&self) -> &DenseMatrix<T> {
        &self.hessian
    }

    pub fn w_star(&self) -> &[T] {
        &self.w_star
    }

    pub fn zeta(&self) -> &[T] {
        &self.zeta
    }

    pub fn noise_scale(&self) -> T {
        self.noise_scale
    }

    /// `diag(BΛBᵀ)`, the per-coordinate variance of the sampled gradient.
    pub fn noise_diag(&self) -> &[T] {
        &self.noise_diag
    }

    /// `B·ζ`, the constant offset between sampled and true gradient.
    pub fn b_zeta(&self) -> &[T] {
        &self.b_zeta
    }

    pub fn init(&self) -> &[T] {
        &self.init
    }

    /// Empirical minimizer `w* − ζ`.
    pub fn empirical_minimizer(&self) -> Vec<T> {
        self.w_star
            .iter()
            .zip(&self.zeta)
            .map(|(&w, &z)| w - z)
            .collect()
    }

    pub fn evaluate(&self, w: &[T]) -> Result<QuadEval<T>> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: w.len(),
            });
        }
        let shifted: Vec<T> = w
            .iter()
            .zip(&self.w_star)
            .zip(&self.zeta)
            .map(|((&w, &ws), &z)| (w - ws) + z)
            .collect();
        let emp_grad = self.hessian.matvec(&shifted)?;
        let true_grad: Vec<T> = emp_grad
            .iter()
            .zip(&self.b_zeta)
            .map(|(&g, &b)| g - b)
            .collect();
        let half = T::lit(0.5);
        let emp_loss = half * dot(&shifted, &emp_grad);
        let offset: Vec<T> = w.iter().zip(&self.w_star).map(|(&w, &ws)| w - ws).collect();
        let true_loss = half * dot(&offset, &true_grad);
        Ok(QuadEval {
            true_loss,
            emp_loss,
            true_grad,
            emp_grad,
        })
    }

    /// Sampled gradient and `diag(BΛBᵀ)`, which already stands for `Σ̂/M`.
    pub fn criterion_inputs(&self, w: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        Ok((self.evaluate(w)?.emp_grad, self.noise_diag.clone()))
    }
}

pub fn quad_losses_and_grads<T: Scalar>(p: &QuadraticProblem<T>, w: &[T]) -> Result<QuadEval<T>> {
    p.evaluate(w)
}

pub fn quad_criterion_inputs<T: Scalar>(
    p: &QuadraticProblem<T>,
    w: &[T],
) -> Result<(Vec<T>, Vec<T>)> {
    p.criterion_inputs(w)
}

impl<T: Scalar> Objective<T> for QuadraticProblem<T> {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn train_size(&self) -> usize {
        1
    }

    fn initial_params(&self) -> Vec<T> {
        self.init.clone()
    }

    fn partition(&self) -> Partition {
        Partition::whole(self.dim()).expect("dim is positive")
    }

    /// The variance is pre-combined with the sample size, so the effective
    /// size is 1.
    fn estimate(&self, w: &[T], batch: Option<&[usize]>) -> Result<GradientEstimate<T>> {
        if batch.is_some() {
            return Err(Error::invalid("quadratic problem has no samples to batch"));
        }
        Ok(GradientEstimate {
            grad: self.evaluate(w)?.emp_grad,
            var_hat: Some(self.noise_diag.clone()),
            effective_size: 1,
        })
    }

    fn train_loss(&self, w: &[T]) -> T {
        self.evaluate(w).map_or(T::nan(), |e| e.emp_loss)
    }

    fn test_loss(&self, w: &[T]) -> Option<T> {
        Some(self.evaluate(w).map_or(T::nan(), |e| e.true_loss))
    }

    fn losses(&self, w: &[T]) -> Losses<T> {
        match self.evaluate(w) {
            Ok(e) => Losses {
                train: e.emp_loss,
                test: Some(e.true_loss),
                val: None,
            },
            Err(_) => Losses {
                train: T::nan(),
                test: None,
                val: None,
            },
        }
    }

    fn supports_batches(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_problem(lambda: f64, gamma: f64) -> QuadraticProblem<f64> {
        let mut rng = RngStream::new(3);
        QuadraticProblem::from_parts(
            DenseMatrix::identity(1),
            vec![gamma],
            vec![0.0],
            lambda,
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn scalar_noise_diag_is_gamma_squared_lambda() {
        let p = scalar_problem(10.0, 2.0);
        assert_eq!(p.noise_diag(), &[40.0]);
    }

    #[test]
    fn criterion_half_on_scalar_case() {
        let p = scalar_problem(10.0, 2.0);
        let f = 20.0 / p.noise_diag()[0];
        assert_eq!(1.0 - f, 0.5);
    }

    #[test]
    fn spectra_are_sorted_and_positive() {
        let kinds = [
            SpectrumKind::Uniform { min: 0.1, max: 1.0 },
            SpectrumKind::Exponential { min: 0.1, max: 1.0 },
            SpectrumKind::Structured {
                small: 0.1,
                large: 1.0,
                n_large: 10,
            },
        ];
        for kind in kinds {
            let ev = kind.eigenvalues(100).unwrap();
            assert!(ev.windows(2).all(|p| p[0] <= p[1]));
            assert!(ev.iter().all(|&g| g > 0.0));
        }
    }

    #[test]
    fn exponential_is_geometric() {
        let ev = SpectrumKind::Exponential {
            min: 0.01,
            max: 1.0,
        }
        .eigenvalues(5)
        .unwrap();
        let ratios: Vec<f64> = ev.windows(2).map(|p| p[1] / p[0]).collect();
        for r in &ratios {
            assert!((r - ratios[0]).abs() < 1e-12);
        }
        assert_eq!(ev[4] / ev[0], 100.0);
    }

    #[test]
    fn structured_counts_large() {
        let ev = SpectrumKind::Structured {
            small: 0.1,
            large: 5.0,
            n_large: 7,
        }
        .eigenvalues(50)
        .unwrap();
        assert_eq!(ev.iter().filter(|&&g| g == 5.0).count(), 7);
        assert!(SpectrumKind::Structured {
            small: 0.1,
            large: 5.0,
            n_large: 51
        }
        .eigenvalues(50)
        .is_err());
    }

    #[test]
    fn minimizers_have_zero_gradients() {
        let mut rng = RngStream::new(11);
        let spectrum = SpectrumKind::Exponential { min: 0.1, max: 1.0 };
        let p = make_quadratic::<f64>(30, spectrum, 10.0, &mut rng).unwrap();
        let at_star = p.evaluate(p.w_star()).unwrap();
        assert!(at_star.true_grad.iter().all(|&g| g == 0.0));
        assert_eq!(at_star.true_loss, 0.0);
        let at_emp = p.evaluate(&p.empirical_minimizer()).unwrap();
        assert!(at_emp.emp_grad.iter().all(|&g| g == 0.0));
        assert_eq!(at_emp.emp_loss, 0.0);
    }

    #[test]
    fn counterexample_start() {
        let mut rng = RngStream::new(5);
        let spectrum = SpectrumKind::Uniform { min: 0.1, max: 1.0 };
        let p = make_quadratic::<f64>(8, spectrum, 10.0, &mut rng)
            .unwrap()
            .with_init(QuadraticInit::Counterexample { factor: 3.0 }, &mut rng)
            .unwrap();
        for (w, z) in p.init().iter().zip(p.zeta()) {
            assert_eq!(*w, -3.0 * z);
        }
    }

    #[test]
    fn batches_rejected() {
        let p = scalar_problem(1.0, 1.0);
        assert!(p.estimate(&[0.0], Some(&[0])).is_err());
    }
}
