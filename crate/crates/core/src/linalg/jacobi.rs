//! Cyclic Jacobi eigenvalue iteration for small dense symmetric matrices.
//!
//! The matrices handled here are at most a handful of rows (k ≤ 10 in
//! practice), so a plain cyclic sweep over all off-diagonal pairs is both
//! simple and accurate to a few ulps of the matrix norm.

/// Stop once the off-diagonal Frobenius mass falls below this fraction of
/// the full Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 50;

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Only the upper triangle is trusted; the lower triangle is mirrored
/// from it before iterating.
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            assert_eq!(matrix[i].len(), n, "matrix must be square");
            (0..n)
                .map(|j| if j >= i { matrix[i][j] } else { matrix[j][i] })
                .collect()
        })
        .collect();

    let total: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return vec![0.0; n];
    }

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOL * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                sum += x * x;
            }
        }
    }
    sum.sqrt()
}

/// Annihilate a[p][q] with a Givens rotation applied on both sides.
fn rotate(a: &mut [Vec<f64>], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let app = a[p][p];
    let aqq = a[q][q];
    let theta = (aqq - app) / (2.0 * apq);
    // Smaller root of t² + 2θt − 1 = 0 keeps the rotation angle ≤ π/4.
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = a.len();
    for k in 0..n {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
}
