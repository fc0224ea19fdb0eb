//! Brute-force reference implementations.
//!
//! These deliberately avoid the eigenvalue and elimination code paths used
//! by [`crate::linalg`]: the gap is found by maximizing the point-to-subspace
//! distance over a deterministic point set on the coefficient sphere, and the
//! determinant by signed permutation expansion.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{dist_point_subspace, GramMatrix, LinalgError, RealVector, Subspace};

pub const MAX_GAP_DIM: usize = 3;
pub const MAX_DET_DIM: usize = 6;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("brute-force gap supports k ≤ {MAX_GAP_DIM}, got k = {0}")]
    GapDimUnsupported(usize),
    #[error("permutation determinant supports size ≤ {MAX_DET_DIM}, got {0}")]
    DetDimUnsupported(usize),
    #[error("sampling plan needs n_samples ≥ 100 and levels ≥ 1")]
    InvalidPlan,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How densely the coefficient sphere is searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingPlan {
    /// Points per level (global sample on level 1, local grid afterwards).
    pub n_samples: usize,
    /// Level 1 is the global sample; each further level shrinks the search
    /// neighbourhood around the incumbent by a factor of 10.
    pub levels: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            levels: 3,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n_samples < 100 || self.levels < 1 {
            return Err(OracleError::InvalidPlan);
        }
        Ok(())
    }
}

/// Lower bound on the gap by sampling unit vectors of `u`.
///
/// Coefficient points: k = 1 uses {±1}; k = 2 uses `n_samples` equally
/// spaced angles; k = 3 uses a Fibonacci lattice of `n_samples` points.
/// Later levels search a shrinking neighbourhood of the best point so far,
/// so the result never decreases as `levels` grows.
pub fn gap_bruteforce(u: &Subspace, v: &Subspace, plan: &SamplingPlan) -> Result<f64, OracleError> {
    plan.validate()?;
    if u.ambient_dim() != v.ambient_dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: u.ambient_dim(),
            found: v.ambient_dim(),
        }
        .into());
    }
    if u.dim() != v.dim() {
        return Err(LinalgError::SubspaceDimMismatch {
            left: u.dim(),
            right: v.dim(),
        }
        .into());
    }
    let k = u.dim();
    let objective = |c: &[f64]| -> Result<f64, LinalgError> {
        let mut x = RealVector::zeros(u.ambient_dim());
        for (ci, b) in c.iter().zip(u.basis()) {
            x = x.axpy(*ci, b);
        }
        dist_point_subspace(&x, v)
    };

    match k {
        1 => {
            let plus = objective(&[1.0])?;
            let minus = objective(&[-1.0])?;
            Ok(plus.max(minus))
        }
        2 => search_circle(plan, objective),
        3 => search_sphere(plan, objective),
        _ => Err(OracleError::GapDimUnsupported(k)),
    }
}

fn search_circle<F>(plan: &SamplingPlan, objective: F) -> Result<f64, OracleError>
where
    F: Fn(&[f64]) -> Result<f64, LinalgError>,
{
    let n = plan.n_samples;
    let eval = |t: f64| objective(&[t.cos(), t.sin()]);

    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        let f = eval(t)?;
        if f > best {
            best = f;
            best_t = t;
        }
    }

    let mut radius = 2.0 * PI / n as f64;
    for _ in 1..plan.levels {
        let center = best_t;
        for i in 0..=n {
            let t = center + radius * (2.0 * i as f64 / n as f64 - 1.0);
            let f = eval(t)?;
            if f > best {
                best = f;
                best_t = t;
            }
        }
        radius /= 10.0;
    }
    Ok(best)
}

fn search_sphere<F>(plan: &SamplingPlan, objective: F) -> Result<f64, OracleError>
where
    F: Fn(&[f64]) -> Result<f64, LinalgError>,
{
    let n = plan.n_samples;
    let golden = PI * (3.0 - 5f64.sqrt());

    let mut best_c = [0.0, 0.0, 1.0];
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = golden * i as f64;
        let c = [r * phi.cos(), r * phi.sin(), z];
        let f = objective(&c)?;
        if f > best {
            best = f;
            best_c = c;
        }
    }

    // Mean spacing of the lattice; the first local grid covers one spacing.
    let mut radius = (4.0 * PI / n as f64).sqrt();
    let side = (n as f64).sqrt().ceil() as usize;
    for _ in 1..plan.levels {
        let center = best_c;
        let (t1, t2) = tangent_frame(&center);
        for a in 0..=side {
            for b in 0..=side {
                let s = radius * (2.0 * a as f64 / side as f64 - 1.0);
                let t = radius * (2.0 * b as f64 / side as f64 - 1.0);
                let p = [
                    center[0] + s * t1[0] + t * t2[0],
                    center[1] + s * t1[1] + t * t2[1],
                    center[2] + s * t1[2] + t * t2[2],
                ];
                let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                let c = [p[0] / norm, p[1] / norm, p[2] / norm];
                let f = objective(&c)?;
                if f > best {
                    best = f;
                    best_c = c;
                }
            }
        }
        radius /= 10.0;
    }
    Ok(best)
}

/// Two unit vectors orthogonal to `c` and to each other.
fn tangent_frame(c: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if c[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let cross = |a: &[f64; 3], b: &[f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let t1 = cross(c, &helper);
    let n1 = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
    let t1 = [t1[0] / n1, t1[1] / n1, t1[2] / n1];
    let t2 = cross(c, &t1);
    (t1, t2)
}

/// Determinant by the Leibniz expansion over all permutations.
pub fn det_bruteforce(m: &GramMatrix) -> Result<f64, OracleError> {
    let n = m.dim();
    if n > MAX_DET_DIM {
        return Err(OracleError::DetDimUnsupported(n));
    }
    let a = m.entries();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    permute(&mut perm, 0, 1.0, &mut |p, sign| {
        let prod: f64 = p.iter().enumerate().map(|(i, &j)| a[i][j]).product();
        total += sign * prod;
    });
    Ok(total)
}

fn permute(perm: &mut [usize], start: usize, sign: f64, visit: &mut impl FnMut(&[usize], f64)) {
    if start == perm.len() {
        visit(perm, sign);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        let s = if i == start { sign } else { -sign };
        permute(perm, start + 1, s, visit);
        perm.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormalize;

    fn span(rows: &[&[f64]]) -> Subspace {
        let vs: Vec<RealVector> = rows.iter().map(|r| RealVector::new(r.to_vec()).unwrap()).collect();
        orthonormalize(&vs).unwrap()
    }

    #[test]
    fn gap_bruteforce_examples() {
        let plan = SamplingPlan::default();
        let u = span(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0]]);
        assert!(gap_bruteforce(&u, &u, &plan).unwrap() <= 1e-12);

        let e1 = span(&[&[1.0, 0.0]]);
        let e2 = span(&[&[0.0, 1.0]]);
        assert!((gap_bruteforce(&e1, &e2, &plan).unwrap() - 1.0).abs() <= 1e-12);

        let diag = span(&[&[1.0, 1.0]]);
        let g = gap_bruteforce(&e1, &diag, &plan).unwrap();
        assert!((g - 0.7071).abs() <= 1e-3, "{g}");
    }

    #[test]
    fn three_dimensional_search_finds_known_angle() {
        // U = span{e1,e2,e3}, V = span{e1, e2, cos t e3 + sin t e4}: gap = sin t.
        let t: f64 = 0.4;
        let u = span(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let v = span(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, t.cos(), t.sin()],
        ]);
        let g = gap_bruteforce(&u, &v, &SamplingPlan::default()).unwrap();
        assert!((g - t.sin()).abs() <= 1e-6, "{g}");
    }

    #[test]
    fn refinement_is_monotone_and_deterministic() {
        let u = span(&[
            &[1.0, 0.3, 0.0, 0.2, 0.0],
            &[0.0, 1.0, 0.4, 0.0, 0.1],
            &[0.2, 0.0, 1.0, 0.0, 0.5],
        ]);
        let v = span(&[
            &[0.7, 0.0, 0.1, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.3, 0.2],
            &[0.0, 0.1, 0.0, 0.2, 1.0],
        ]);
        let mut last = f64::NEG_INFINITY;
        for levels in 1..=4 {
            let plan = SamplingPlan { n_samples: 400, levels };
            let g = gap_bruteforce(&u, &v, &plan).unwrap();
            assert!(g >= last);
            assert_eq!(g.to_bits(), gap_bruteforce(&u, &v, &plan).unwrap().to_bits());
            last = g;
        }
    }

    #[test]
    fn gap_bruteforce_rejects_unsupported_inputs() {
        let u = span(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert_eq!(
            gap_bruteforce(&u, &u, &SamplingPlan::default()).unwrap_err(),
            OracleError::GapDimUnsupported(4)
        );
        let bad = SamplingPlan {
            n_samples: 10,
            levels: 1,
        };
        let e1 = span(&[&[1.0, 0.0]]);
        assert_eq!(gap_bruteforce(&e1, &e1, &bad).unwrap_err(), OracleError::InvalidPlan);
        let e12 = span(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(gap_bruteforce(&e1, &e12, &SamplingPlan::default()).is_err());
    }

    #[test]
    fn det_bruteforce_examples() {
        let id = GramMatrix::from_entries(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(det_bruteforce(&id).unwrap(), 1.0);
        let m = GramMatrix::from_entries(vec![vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(det_bruteforce(&m).unwrap(), 1.0);
        let s = GramMatrix::from_entries(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(det_bruteforce(&s).unwrap(), 0.0);
    }

    #[test]
    fn det_bruteforce_rejects_large_matrices() {
        let m = GramMatrix::from_entries(vec![vec![0.0; 7]; 7]).unwrap();
        assert_eq!(det_bruteforce(&m).unwrap_err(), OracleError::DetDimUnsupported(7));
    }
}
