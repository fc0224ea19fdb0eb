use serde::{Deserialize, Serialize};

use super::vector::{check_dims, dot};
use super::{LinalgError, RealVector};

const SYMMETRY_TOL: f64 = 1e-12;

/// Matrix of pairwise inner products ⟨x_i, x_j⟩.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    entries: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn of(vectors: &[RealVector]) -> Result<Self, LinalgError> {
        let first = vectors.first().ok_or(LinalgError::NoVectors)?;
        for v in vectors {
            check_dims(first.dim(), v.dim())?;
        }
        let entries = vectors
            .iter()
            .map(|a| vectors.iter().map(|b| dot(a.coords(), b.coords())).collect())
            .collect();
        Ok(Self { entries })
    }

    /// Wraps an explicit square matrix, checking symmetry within 1e−12.
    pub fn from_entries(entries: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        let n = entries.len();
        if n == 0 {
            return Err(LinalgError::NoVectors);
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(LinalgError::NotSquare {
                    rows: n,
                    row,
                    len: r.len(),
                });
            }
            if let Some(index) = r.iter().position(|x| !x.is_finite()) {
                return Err(LinalgError::NonFinite { index });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let scale = 1f64.max(entries[i][j].abs());
                if (entries[i][j] - entries[j][i]).abs() > SYMMETRY_TOL * scale {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.dim();
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .expect("non-empty range");
            if a[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            for row in (col + 1)..n {
                let factor = a[row][col] / p;
                if factor != 0.0 {
                    for k in col..n {
                        a[row][k] -= factor * a[col][k];
                    }
                }
            }
        }
        det
    }
}

/// Gramian G(x_1, …, x_n): determinant of the Gram matrix.
pub fn gramian(vectors: &[RealVector]) -> Result<f64, LinalgError> {
    Ok(GramMatrix::of(vectors)?.determinant())
}

/// Standard n-norm ‖x_1, …, x_n‖ = √G(x_1, …, x_n), with small negative
/// round-off in the Gramian read as zero.
pub fn n_norm(vectors: &[RealVector]) -> Result<f64, LinalgError> {
    Ok(gramian(vectors)?.max(0.0).sqrt())
}
