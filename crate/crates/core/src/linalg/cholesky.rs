use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `M = L Lᵀ` of a symmetric positive-definite matrix.
///
/// The factor is immutable once built; solves only read it.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    n: usize,
    // Row-major lower triangle; row i holds L[i][0..=i] at i*n.
    l: Vec<f64>,
    min_pivot: f64,
}

/// Factorizes a symmetric matrix, failing with [`Error::NotPositiveDefinite`]
/// at the first non-positive pivot.
pub fn spd_factorize(m: &DMatrix<f64>) -> Result<SpdFactor> {
    SpdFactor::new(m)
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        Self::with_pivot_floor(m, 0.0)
    }

    /// Factorizes `m`, rejecting any squared pivot `<= floor`.
    pub fn with_pivot_floor(m: &DMatrix<f64>, floor: f64) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
        check_symmetric(m)?;

        let mut l = vec![0.0; n * n];
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            let (head, tail) = l.split_at_mut(j * n);
            let row_j = &mut tail[..n];
            for k in 0..j {
                let row_k = &head[k * n..k * n + k];
                let dot: f64 = row_k.iter().zip(&row_j[..k]).map(|(a, b)| a * b).sum();
                row_j[k] = (m[(j, k)] - dot) / head[k * n + k];
            }
            let diag = m[(j, j)] - row_j[..j].iter().map(|v| v * v).sum::<f64>();
            if !(diag > floor) {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: diag,
                });
            }
            let d = diag.sqrt();
            min_pivot = min_pivot.min(d);
            row_j[j] = d;
        }
        Ok(Self { n, l, min_pivot })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest diagonal entry of `L`; a conditioning diagnostic.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// `log det M = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| self.l[i * self.n + i].ln()).sum::<f64>() * 2.0
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = rhs.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        assert_eq!(x.len(), n);
        // L z = b
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.l[i * n + i];
        }
        // Lᵀ x = z
        for i in (0..n).rev() {
            x[i] /= self.l[i * n + i];
            let xi = x[i];
            let row = &self.l[i * n..i * n + i];
            for (xk, lik) in x[..i].iter_mut().zip(row) {
                *xk -= lik * xi;
            }
        }
    }

    /// Dense inverse, assembled column by column from unit-vector solves.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut inv = DMatrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            self.solve_in_place(&mut col);
            inv.column_mut(j).copy_from_slice(&col);
        }
        // symmetrize round-off
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }
        inv
    }

    /// The factor `L` as a dense matrix.
    pub fn lower(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| if j <= i { self.l[i * self.n + j] } else { 0.0 })
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}
