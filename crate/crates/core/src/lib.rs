//! Gap distances between finite-dimensional subspaces of ℝ^d and ideal
//! convergence of sequences of subspaces.
//!
//! * [`linalg`]: projections, the subspace gap, Gram determinants and n-norms.
//! * [`oracle`]: brute-force references for the closed-form kernels.
//! * [`ideals`]: ideals on ℕ, finite-horizon membership and natural density.
//! * [`convergence`]: exceptional sets, I-limits and the five equivalent
//!   convergence criteria.
//! * [`cli`]: the `subspace-limits` command line.

pub mod cli;
pub mod convergence;
pub mod ideals;
pub mod linalg;
pub mod oracle;
