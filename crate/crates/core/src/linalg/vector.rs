use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::LinalgError;

/// A finite-coordinate vector in ℝ^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector {
    coords: Vec<f64>,
}

impl RealVector {
    pub fn new(coords: Vec<f64>) -> Result<Self, LinalgError> {
        if coords.is_empty() {
            return Err(LinalgError::EmptyVector);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self { coords })
    }

    /// Canonical basis vector `e_{axis+1}` of ℝ^dim (`axis` is zero-based).
    pub fn unit(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut coords = vec![0.0; dim];
        coords[axis] = 1.0;
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vectors have at least one coordinate");
        Self { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self + factor * other`; dimensions must already agree.
    pub(crate) fn axpy(&self, factor: f64, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.axpy(-1.0, other))
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.axpy(1.0, other))
    }

    /// Unit vector in the same direction. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self, LinalgError> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(LinalgError::RankDeficient { index: 0 });
        }
        Ok(self.scaled(1.0 / norm))
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = LinalgError;

    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(coords)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.coords
    }
}

impl Index<usize> for RealVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl fmt::Display for RealVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected != found {
        return Err(LinalgError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Standard dot product ⟨u, v⟩ = Σ u_i v_i.
pub fn inner(u: &RealVector, v: &RealVector) -> Result<f64, LinalgError> {
    check_dims(u.dim(), v.dim())?;
    Ok(dot(u.coords(), v.coords()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// |x|² for a scalar. Over ℝ this is a plain square; kept as a named
/// operation so that every identity is written in terms of the modulus.
#[inline]
pub fn modulus_sq(x: f64) -> f64 {
    x * x
}
