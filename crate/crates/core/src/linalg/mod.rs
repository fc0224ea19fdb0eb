//! Dense kernels over ℝ^d: inner products, orthonormal bases, projections,
//! point-to-subspace distance, the subspace gap, Gram determinants and the
//! standard n-norm.

mod gram;
pub mod jacobi;
mod subspace;
mod vector;

use thiserror::Error;

pub use gram::{gramian, n_norm, GramMatrix};
pub use subspace::{
    dist_point_subspace, gap, gap_cross_gram, orthonormalize, orthonormalize_with, project, projection_norm_sq,
    Subspace,
};
pub use vector::{inner, modulus_sq, RealVector};

/// Maximum entry of |BᵀB − I| accepted for an orthonormal basis.
pub const TOL_ORTHO: f64 = 1e-10;
/// Relative residual below which a vector is treated as dependent on its
/// predecessors during orthonormalization.
pub const RANK_TOL: f64 = 1e-8;
/// Gap below which two subspaces are reported as equal.
pub const EQUALITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub ortho: f64,
    pub rank: f64,
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ortho: TOL_ORTHO,
            rank: RANK_TOL,
            equality: EQUALITY_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace dimensions differ: {left} vs {right}")]
    SubspaceDimMismatch { left: usize, right: usize },
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("vectors need at least one coordinate")]
    EmptyVector,
    #[error("at least one vector is required")]
    NoVectors,
    #[error("{count} vectors cannot be independent in dimension {dim}")]
    TooManyVectors { count: usize, dim: usize },
    #[error("vector {index} is linearly dependent on the preceding vectors")]
    RankDeficient { index: usize },
    #[error("basis is not orthonormal (max |BᵀB - I| = {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
}
