use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{CsrMatrix, SpdFactor};
use crate::error::{Error, Result};

/// A linear equality block `A x = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearEqualities {
    pub a: CsrMatrix,
    pub b: DVector<f64>,
}

impl LinearEqualities {
    pub fn new(a: CsrMatrix, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.len(),
            });
        }
        Ok(Self { a, b })
    }

    /// Largest absolute residual `|A x - b|_inf`.
    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        (self.a.mul_vec(x) - &self.b).amax()
    }
}

/// Orthogonal projector onto `{v : A v = 0}`, i.e. `P = I - Aᵀ (A Aᵀ)⁻¹ A`.
///
/// `P` is never formed; each projection costs two sparse products and one
/// solve with the Cholesky factor of `A Aᵀ`.
#[derive(Debug, Clone)]
pub struct EqualityProjector {
    a: CsrMatrix,
    factor: Option<SpdFactor>,
}

impl EqualityProjector {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let p = a.nrows();
        if p > a.ncols() {
            return Err(Error::RankDeficient { pivot: a.ncols() });
        }
        if p == 0 {
            return Ok(Self::identity(a.ncols()));
        }
        let gram = a.gram();
        let max_diag = (0..p).map(|i| gram[(i, i)]).fold(0.0, f64::max);
        let factor = SpdFactor::with_pivot_floor(&gram, 1e-12 * max_diag).map_err(|e| match e {
            Error::NotPositiveDefinite { pivot, .. } => Error::RankDeficient { pivot },
            other => other,
        })?;
        Ok(Self {
            a: a.clone(),
            factor: Some(factor),
        })
    }

    /// The projector of an empty equality block.
    pub fn identity(n: usize) -> Self {
        Self {
            a: CsrMatrix::zeros(0, n),
            factor: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_equalities(&self) -> usize {
        self.a.nrows()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.factor {
            None => v.clone(),
            Some(f) => {
                let w = f.solve(&self.a.mul_vec(v));
                v - self.a.transpose_mul_vec(&w)
            }
        }
    }

    /// Minimum-norm solution `Aᵀ (A Aᵀ)⁻¹ b` of `A x = b`.
    pub fn particular_solution(&self, b: &DVector<f64>) -> DVector<f64> {
        match &self.factor {
            None => DVector::zeros(self.dim()),
            Some(f) => self.a.transpose_mul_vec(&f.solve(b)),
        }
    }

    /// Euclidean projection of `x` onto the affine set `{A x = b}`.
    pub fn project_affine(&self, x: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        self.particular_solution(b) + self.project(x)
    }

    /// Dense `P`; for tests and small problems.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut p = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            p.set_column(j, &self.project(&e));
        }
        p
    }
}
