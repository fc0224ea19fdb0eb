use serde::{Deserialize, Serialize};

use super::jacobi::symmetric_eigenvalues;
use super::vector::{check_dims, dot, modulus_sq};
use super::{LinalgError, RealVector, Tolerances, TOL_ORTHO};

/// A k-dimensional subspace of ℝ^d, held as an orthonormal basis.
///
/// The basis order is part of the value: criteria evaluated per basis
/// vector depend on it, while the gap does not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RealVector>", into = "Vec<RealVector>")]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<RealVector>,
}

impl Subspace {
    /// Accepts a basis that is already orthonormal within [`TOL_ORTHO`].
    pub fn from_orthonormal(basis: Vec<RealVector>) -> Result<Self, LinalgError> {
        let first = basis.first().ok_or(LinalgError::NoVectors)?;
        let ambient_dim = first.dim();
        for v in &basis {
            check_dims(ambient_dim, v.dim())?;
        }
        if basis.len() > ambient_dim {
            return Err(LinalgError::TooManyVectors {
                count: basis.len(),
                dim: ambient_dim,
            });
        }
        let subspace = Self { ambient_dim, basis };
        let defect = subspace.orthonormality_defect();
        if defect > TOL_ORTHO {
            return Err(LinalgError::NotOrthonormal { defect });
        }
        Ok(subspace)
    }

    /// Span of the canonical vectors `e_{a+1}` for each zero-based axis `a`.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Result<Self, LinalgError> {
        if let Some(&axis) = axes.iter().find(|&&a| a >= ambient_dim) {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient_dim,
                found: axis + 1,
            });
        }
        Self::from_orthonormal(axes.iter().map(|&a| RealVector::unit(ambient_dim, a)).collect())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Subspace dimension k.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RealVector] {
        &self.basis
    }

    /// max |BᵀB − I| over all entries.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(bi.coords(), bj.coords()) - target).abs());
            }
        }
        worst
    }

    /// Same subspace, basis replaced by `B·Q` for a k×k orthogonal `Q`
    /// (row-major, `q[l][i]` multiplies basis vector `l` into new vector `i`).
    pub fn rotate_basis(&self, q: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let k = self.dim();
        check_dims(k, q.len())?;
        for row in q {
            check_dims(k, row.len())?;
        }
        let basis = (0..k)
            .map(|i| {
                let mut v = RealVector::zeros(self.ambient_dim);
                for (l, b) in self.basis.iter().enumerate() {
                    v = v.axpy(q[l][i], b);
                }
                v
            })
            .collect();
        Self::from_orthonormal(basis)
    }

    /// Coefficients ⟨u, v_j⟩ of `u` against each basis vector.
    pub fn coefficients(&self, u: &RealVector) -> Result<Vec<f64>, LinalgError> {
        check_dims(self.ambient_dim, u.dim())?;
        Ok(self.basis.iter().map(|v| dot(u.coords(), v.coords())).collect())
    }
}

impl TryFrom<Vec<RealVector>> for Subspace {
    type Error = LinalgError;

    fn try_from(basis: Vec<RealVector>) -> Result<Self, Self::Error> {
        Self::from_orthonormal(basis)
    }
}

impl From<Subspace> for Vec<RealVector> {
    fn from(s: Subspace) -> Self {
        s.basis
    }
}

/// Orthonormal basis for the span of `vectors`, with default tolerances.
pub fn orthonormalize(vectors: &[RealVector]) -> Result<Subspace, LinalgError> {
    orthonormalize_with(vectors, &Tolerances::default())
}

/// Modified Gram–Schmidt followed by a second full orthogonalization pass.
///
/// Vector `i` is rejected when, after removing its components along the
/// earlier basis vectors, less than `tol.rank` of its original norm remains.
pub fn orthonormalize_with(vectors: &[RealVector], tol: &Tolerances) -> Result<Subspace, LinalgError> {
    let first = vectors.first().ok_or(LinalgError::NoVectors)?;
    let d = first.dim();
    for v in vectors {
        check_dims(d, v.dim())?;
    }
    if vectors.len() > d {
        return Err(LinalgError::TooManyVectors {
            count: vectors.len(),
            dim: d,
        });
    }

    let mut basis: Vec<RealVector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let original = v.norm();
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &basis {
                let c = dot(w.coords(), b.coords());
                w = w.axpy(-c, b);
            }
        }
        let residual = w.norm();
        if original == 0.0 || residual < tol.rank * original {
            return Err(LinalgError::RankDeficient { index });
        }
        basis.push(w.scaled(1.0 / residual));
    }

    let subspace = Subspace { ambient_dim: d, basis };
    let defect = subspace.orthonormality_defect();
    if defect > tol.ortho {
        return Err(LinalgError::NotOrthonormal { defect });
    }
    Ok(subspace)
}

/// Orthogonal projection P_V(u) = Σ_j ⟨u, v_j⟩ v_j.
pub fn project(u: &RealVector, v: &Subspace) -> Result<RealVector, LinalgError> {
    let coeffs = v.coefficients(u)?;
    let mut p = RealVector::zeros(v.ambient_dim());
    for (c, b) in coeffs.iter().zip(v.basis()) {
        p = p.axpy(*c, b);
    }
    Ok(p)
}

/// ‖u − P_V(u)‖.
pub fn dist_point_subspace(u: &RealVector, v: &Subspace) -> Result<f64, LinalgError> {
    let p = project(u, v)?;
    Ok(u.axpy(-1.0, &p).norm())
}

/// Σ_j |⟨u, v_j⟩|², which equals ‖P_V(u)‖² for an orthonormal basis.
pub fn projection_norm_sq(u: &RealVector, v: &Subspace) -> Result<f64, LinalgError> {
    Ok(v.coefficients(u)?.into_iter().map(modulus_sq).sum())
}

fn check_pair(u: &Subspace, v: &Subspace) -> Result<(), LinalgError> {
    check_dims(u.ambient_dim(), v.ambient_dim())?;
    if u.dim() != v.dim() {
        return Err(LinalgError::SubspaceDimMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(())
}

/// Gap sup_{u ∈ U, ‖u‖ = 1} ‖u − P_V(u)‖ between equal-dimension subspaces.
///
/// Evaluated as the largest singular value of the residual matrix
/// R = A − B(BᵀA), whose squared singular values are the eigenvalues of
/// I − GGᵀ with G = AᵀB. Working from R keeps full relative accuracy for
/// nearly equal subspaces, where 1 − λ_min(GGᵀ) cancels catastrophically.
pub fn gap(u: &Subspace, v: &Subspace) -> Result<f64, LinalgError> {
    check_pair(u, v)?;
    let residuals: Vec<RealVector> = u
        .basis()
        .iter()
        .map(|a| project(a, v).map(|p| a.axpy(-1.0, &p)))
        .collect::<Result<_, _>>()?;
    let k = residuals.len();
    let rtr: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| dot(residuals[i].coords(), residuals[j].coords()))
                .collect()
        })
        .collect();
    let largest = symmetric_eigenvalues(&rtr).last().copied().unwrap_or(0.0);
    Ok(largest.clamp(0.0, 1.0).sqrt())
}

/// Gap through the cross-Gram matrix: √(1 − λ_min(GGᵀ)) with G = AᵀB and
/// the radicand clamped to [0, 1].
///
/// Agrees with [`gap`] up to round-off in 1 − λ_min, i.e. to about 1e−8
/// absolute near zero and much better elsewhere.
pub fn gap_cross_gram(u: &Subspace, v: &Subspace) -> Result<f64, LinalgError> {
    check_pair(u, v)?;
    let g: Vec<Vec<f64>> = u.basis().iter().map(|a| v.coefficients(a)).collect::<Result<_, _>>()?;
    let k = g.len();
    let m: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dot(&g[i], &g[j])).collect()).collect();
    let smallest = symmetric_eigenvalues(&m).first().copied().unwrap_or(1.0);
    Ok((1.0 - smallest).clamp(0.0, 1.0).sqrt())
}
