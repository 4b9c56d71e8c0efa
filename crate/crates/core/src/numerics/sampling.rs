use rayon::prelude::*;

use super::matrix::DenseMatrix;
use super::rng::RngStream;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `dim` i.i.d. draws from `N(mean, stddev²)`.
pub fn gaussian_vector<T: Scalar>(
    dim: usize,
    mean: T,
    stddev: T,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    if dim == 0 {
        return Err(Error::invalid("gaussian_vector: dim must be positive"));
    }
    if !(stddev >= T::zero()) {
        return Err(Error::invalid(
            "gaussian_vector: stddev must be nonnegative",
        ));
    }
    Ok((0..dim)
        .map(|_| mean + stddev * T::lit(rng.standard_normal()))
        .collect())
}

/// Haar-distributed orthogonal matrix.
///
/// Householder QR of an i.i.d. standard-normal matrix `G = QR`, followed by
/// multiplying column `j` of `Q` by `sign(R_jj)`. With that sign fix the
/// factorization is unique and `Q` is exactly Haar distributed.
pub fn haar_orthogonal<T: Scalar>(dim: usize, rng: &mut RngStream) -> Result<DenseMatrix<T>> {
    if dim == 0 {
        return Err(Error::invalid("haar_orthogonal: dim must be positive"));
    }
    let n = dim;
    // Gaussian draws fill G row by row; `cols[j][i] = G[i][j]`.
    let mut cols = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for col in cols.iter_mut() {
            col[i] = T::lit(rng.standard_normal());
        }
    }

    let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut r_diag = vec![T::zero(); n];
    for k in 0..n {
        let x = &cols[k][k..];
        let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        let alpha = if x[0] >= T::zero() { -norm } else { norm };
        r_diag[k] = alpha;
        let mut v: Vec<T> = x.to_vec();
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|&e| e * e).sum::<T>().sqrt();
        if vnorm > T::zero() {
            v.iter_mut().for_each(|e| *e = *e / vnorm);
        }
        let (_, rest) = cols.split_at_mut(k + 1);
        rest.par_iter_mut()
            .for_each(|col| reflect(&v, &mut col[k..]));
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}; apply to identity columns from the right end.
    let mut q: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    q.par_iter_mut().for_each(|col| {
        for k in (0..n).rev() {
            reflect(&reflectors[k], &mut col[k..]);
        }
    });

    let mut out = DenseMatrix::zeros(n, n);
    for (j, col) in q.iter().enumerate() {
        let sign = if r_diag[j] < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        for (i, &v) in col.iter().enumerate() {
            out[(i, j)] = sign * v;
        }
    }
    Ok(out)
}

/// `x ← (I − 2vvᵀ) x` for unit `v`.
fn reflect<T: Scalar>(v: &[T], x: &mut [T]) {
    let proj = v
        .iter()
        .zip(x.iter())
        .fold(T::zero(), |a, (&p, &q)| a + p * q);
    let two = proj + proj;
    for (xi, &vi) in x.iter_mut().zip(v) {
        *xi = *xi - two * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stddev_gives_constant() {
        let mut rng = RngStream::new(1);
        let v: Vec<f64> = gaussian_vector(3, 2.5, 0.0, &mut rng).unwrap();
        assert_eq!(v, vec![2.5, 2.5, 2.5]);
    }

    #[test]
    fn zero_dim_rejected() {
        let mut rng = RngStream::new(1);
        assert!(gaussian_vector::<f64>(0, 0.0, 1.0, &mut rng).is_err());
        assert!(haar_orthogonal::<f64>(0, &mut rng).is_err());
        assert!(gaussian_vector::<f64>(2, 0.0, -1.0, &mut rng).is_err());
    }

    #[test]
    fn fresh_streams_reproduce() {
        let a: Vec<f64> = gaussian_vector(4, 0.0, 1.0, &mut RngStream::new(42)).unwrap();
        let b: Vec<f64> = gaussian_vector(4, 0.0, 1.0, &mut RngStream::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_by_one_is_sign() {
        for seed in 0..20 {
            let r: DenseMatrix<f64> = haar_orthogonal(1, &mut RngStream::new(seed)).unwrap();
            assert_eq!(r[(0, 0)].abs(), 1.0);
        }
    }

    #[test]
    fn fifty_dim_is_orthogonal() {
        let r: DenseMatrix<f64> = haar_orthogonal(50, &mut RngStream::new(5)).unwrap();
        assert!(r.orthogonality_defect() <= 1e-10);
        let det = r.determinant().unwrap();
        assert!((det.abs() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn single_precision_orthogonal() {
        let r: DenseMatrix<f32> = haar_orthogonal(20, &mut RngStream::new(5)).unwrap();
        assert!(r.orthogonality_defect() <= 1e-5);
    }
}
