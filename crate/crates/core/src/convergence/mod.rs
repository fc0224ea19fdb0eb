//! Ideal convergence of subspace sequences.
//!
//! For a candidate limit V and an ideal I, U_n I-converges to V when every
//! exceptional set A(ε) = {n : gap(U_n, V) ≥ ε} belongs to I. Four further
//! criteria, read off an orthonormal basis u_1, …, u_k of U_n and an
//! orthonormal basis v_1, …, v_k of V, are equivalent to it:
//!
//! * I-lim ‖u_i − P_V(u_i)‖ = 0 for every i;
//! * I-lim Σ_j |⟨u_i, v_j⟩|² = 1 for every i;
//! * I-lim ‖P_V(u_i)‖ = 1 for every i;
//! * I-lim ‖u_i, v_1, …, v_k‖ = 0 for every i.
//!
//! Convergence also forces I-lim ‖u_i, P_V(u_i)‖ = 0, without the converse.

mod battery;
mod engine;
mod examples;
mod family;
mod sequence;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ideals::{IdealError, Membership};
use crate::linalg::LinalgError;

pub use battery::{battery, BatteryMember, BATTERY_HORIZON};
pub use engine::{
    equivalence_suite, exceptional_set, gap_trace, pair_volume_check, scalar_i_limit, statistical_converges,
    subspace_i_converges, usual_converges, worker_count, ConvergenceReport, CriterionOutcome, EpsilonSummary,
    EpsilonVerdict, Evaluation, ExceptionalSetTrace, LimitVerdict, PairVolumeReport, PointwiseRecord,
};
pub use examples::{odd_escape, orthogonal_constant, BuiltinExample, OddEscapeVariant};
pub use family::{AngleProfile, Support, TiltFamily};
pub use sequence::{CertificateRule, ScalarRule, ScalarSequence, SubspaceRule, SubspaceSequence};

pub const DEFAULT_EPS_GRID: [f64; 3] = [0.5, 0.1, 0.01];

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("sequence rule failed at n = {n}: {source}")]
    Rule { n: u64, source: LinalgError },
    #[error("sequence rule at n = {n} produced a {}-dimensional subspace of R^{}, expected {}-dimensional in R^{}", found.1, found.0, expected.1, expected.0)]
    RuleShape {
        n: u64,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("scalar sequence is not finite at n = {n}")]
    NonFinite { n: u64 },
    #[error("limit is a {}-dimensional subspace of R^{} but the sequence is {}-dimensional in R^{}", limit.1, limit.0, sequence.1, sequence.0)]
    LimitShape {
        sequence: (usize, usize),
        limit: (usize, usize),
    },
    #[error("epsilon grid is empty")]
    EmptyGrid,
    #[error("epsilon must be finite and positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("invalid sequence description: {0}")]
    InvalidSequence(String),
}

/// Answer to "does the sequence converge under this ideal?".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    DoesNotConverge,
    Inconclusive,
}

impl Verdict {
    /// Converges when every exceptional set is in the ideal, fails as soon
    /// as one is not.
    pub fn from_statuses(statuses: impl IntoIterator<Item = Membership>) -> Self {
        match combine(statuses) {
            Membership::InIdeal => Verdict::Converges,
            Membership::NotInIdeal => Verdict::DoesNotConverge,
            Membership::Inconclusive => Verdict::Inconclusive,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Converges => "converges",
            Verdict::DoesNotConverge => "does_not_converge",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Conjunction of membership answers: any NotInIdeal wins, then any
/// Inconclusive; the empty conjunction is InIdeal.
pub fn combine(statuses: impl IntoIterator<Item = Membership>) -> Membership {
    let mut out = Membership::InIdeal;
    for s in statuses {
        match s {
            Membership::NotInIdeal => return Membership::NotInIdeal,
            Membership::Inconclusive => out = Membership::Inconclusive,
            Membership::InIdeal => {}
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// gap(U_n, V) → 0.
    Gap,
    /// ‖u_i − P_V(u_i)‖ → 0.
    Residual,
    /// Σ_j |⟨u_i, v_j⟩|² → 1.
    CoefficientMass,
    /// ‖P_V(u_i)‖ → 1.
    ProjectionNorm,
    /// ‖u_i, v_1, …, v_k‖ → 0.
    Volume,
    /// ‖u_i, P_V(u_i)‖ → 0; implied by the others, not equivalent.
    PairVolume,
}

impl Criterion {
    pub const EQUIVALENT: [Criterion; 5] = [
        Criterion::Gap,
        Criterion::Residual,
        Criterion::CoefficientMass,
        Criterion::ProjectionNorm,
        Criterion::Volume,
    ];

    /// The value the criterion's scalar sequences must approach.
    pub fn candidate(&self) -> f64 {
        match self {
            Criterion::CoefficientMass | Criterion::ProjectionNorm => 1.0,
            _ => 0.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Gap => "gap",
            Criterion::Residual => "residual",
            Criterion::CoefficientMass => "coefficient_mass",
            Criterion::ProjectionNorm => "projection_norm",
            Criterion::Volume => "volume",
            Criterion::PairVolume => "pair_volume",
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every ε must be finite and strictly positive.
pub fn validate_eps_grid(grid: &[f64]) -> Result<(), ConvergenceError> {
    if grid.is_empty() {
        return Err(ConvergenceError::EmptyGrid);
    }
    match grid.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        Some(&bad) => Err(ConvergenceError::InvalidEpsilon(bad)),
        None => Ok(()),
    }
}
