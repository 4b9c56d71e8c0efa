//! Seeded sampling, dense matrices, Haar rotations and the finite-difference oracle.

mod finite_diff;
mod matrix;
mod rng;
mod sampling;

pub use finite_diff::{finite_diff_gradient, relative_error};
pub use matrix::DenseMatrix;
pub use rng::RngStream;
pub use sampling::{gaussian_vector, haar_orthogonal};
