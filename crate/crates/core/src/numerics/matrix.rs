use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self · x`
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok(self
            .data
            .par_chunks(self.cols.max(1))
            .map(|row| dot(row, x))
            .collect())
    }

    /// `selfᵀ · x`
    pub fn transpose_matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: x.len(),
            });
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * xi;
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let ot = other.transpose();
        let ot = &ot;
        let data: Vec<T> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let r = self.row(i);
                (0..ot.rows).map(move |j| dot(r, ot.row(j)))
            })
            .collect();
        Self::from_row_major(self.rows, other.cols, data)
    }

    /// `self · diag(scale) · selfᵀ`, exploiting symmetry of the result.
    pub fn congruence_diag(&self, scale: &[T]) -> Result<Self> {
        if scale.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: scale.len(),
            });
        }
        let n = self.rows;
        let scaled: Vec<Vec<T>> = (0..n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(scale)
                    .map(|(&a, &s)| a * s)
                    .collect()
            })
            .collect();
        let upper: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|l| dot(&scaled[i], self.row(l))).collect())
            .collect();
        let mut out = Self::zeros(n, n);
        for (i, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                out[(i, i + off)] = v;
                out[(i + off, i)] = v;
            }
        }
        Ok(out)
    }

    /// Largest absolute entry of `selfᵀ·self − I`.
    pub fn orthogonality_defect(&self) -> T {
        let gram = self.transpose().matmul(self).expect("square product");
        let mut worst = T::zero();
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::invalid("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = T::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| {
                    a[x * n + k]
                        .abs()
                        .partial_cmp(&a[y * n + k].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("nonempty range");
            if a[p * n + k] == T::zero() {
                return Ok(T::zero());
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det = det * pivot;
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                for j in k..n {
                    a[i * n + j] = a[i * n + j] - factor * a[k * n + j];
                }
            }
        }
        Ok(det)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}
