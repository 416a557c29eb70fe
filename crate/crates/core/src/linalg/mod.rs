//! Dense symmetric positive-definite factorization, coordinate-format sparse
//! matrices and the Rosen projector onto the null space of an equality block.

mod cholesky;
mod projector;
mod sparse;

pub use cholesky::{spd_factorize, SpdFactor};
pub use projector::{EqualityProjector, LinearEqualities};
pub use sparse::{CsrMatrix, Triplet};

use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues of a symmetric matrix, sorted in decreasing order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}
