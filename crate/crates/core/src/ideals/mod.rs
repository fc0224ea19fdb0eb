//! Ideals on ℕ and finite-horizon membership decisions.
//!
//! Three ideals are built in: the finite sets, the sets of natural density
//! zero, and the sets meeting only finitely many blocks
//! `D_j = {2^{j−1}(2s − 1) : s ∈ ℕ}`. Membership of a set observed only up
//! to a horizon cannot be decided in general, so verdicts are tri-state.
//! A [`TailCertificate`] describing the set beyond the horizon turns a
//! verdict exact when it implies membership.

mod axioms;
mod index_set;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use axioms::{axioms_check, AxiomCheck, AxiomReport};
pub use index_set::IndexSet;

pub const DEFAULT_TAU: f64 = 0.01;
pub const DEFAULT_CHECKPOINTS: usize = 5;
pub const DEFAULT_WINDOW: f64 = 0.2;
pub const MIN_DENSITY_HORIZON: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("member {member} outside 1..={horizon}")]
    OutOfRange { member: u64, horizon: u64 },
    #[error("index sets have different horizons ({left} vs {right})")]
    HorizonMismatch { left: u64, right: u64 },
    #[error("partial density at {j} needs data up to {j}, horizon is {horizon}")]
    BeyondHorizon { j: u64, horizon: u64 },
    #[error("density index must be at least 1")]
    ZeroIndex,
    #[error("density estimation needs horizon ≥ {MIN_DENSITY_HORIZON}, got {0}")]
    HorizonTooShort(u64),
    #[error("member {member} is not covered by the tail certificate")]
    CertificateViolated { member: u64 },
    #[error("invalid ideal parameters: {0}")]
    InvalidIdeal(String),
}

/// Index j of the block D_j containing `n`: one plus the 2-adic valuation.
///
/// # Panics
/// If `n == 0`; blocks partition ℕ = {1, 2, …}.
pub fn block_index(n: u64) -> u32 {
    assert!(n > 0, "block_index is defined for n ≥ 1");
    n.trailing_zeros() + 1
}

/// d_j(P) = |P ∩ {1, …, j}| / j.
pub fn partial_density(set: &IndexSet, j: u64) -> Result<f64, IdealError> {
    if j == 0 {
        return Err(IdealError::ZeroIndex);
    }
    if j > set.horizon() {
        return Err(IdealError::BeyondHorizon {
            j,
            horizon: set.horizon(),
        });
    }
    Ok(set.count_up_to(j) as f64 / j as f64)
}

/// Partial density at one checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// d_N(P) at the horizon N.
    pub estimate: f64,
    /// Partial densities at ⌊N / 2^i⌋ for i = 0, 1, …; first entry is the horizon.
    pub checkpoints: Vec<Checkpoint>,
}

impl DensityEstimate {
    /// Density does not grow with N, up to `slack` between neighbours.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.checkpoints
            .windows(2)
            .all(|w| w[0].density <= w[1].density + slack)
    }

    /// Density does not shrink with N, up to `slack` between neighbours.
    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        self.checkpoints
            .windows(2)
            .all(|w| w[0].density >= w[1].density - slack)
    }

    fn smallest_checkpoint(&self) -> u64 {
        self.checkpoints.last().map_or(1, |c| c.n)
    }
}

/// Natural-density estimate at the horizon plus the dyadic trend
/// N, N/2, …, N/16.
pub fn density_estimate(set: &IndexSet) -> Result<DensityEstimate, IdealError> {
    if set.horizon() < MIN_DENSITY_HORIZON {
        return Err(IdealError::HorizonTooShort(set.horizon()));
    }
    Ok(density_trend(set, DEFAULT_CHECKPOINTS))
}

fn density_trend(set: &IndexSet, count: usize) -> DensityEstimate {
    let checkpoints: Vec<Checkpoint> = dyadic_checkpoints(set.horizon(), count)
        .into_iter()
        .map(|n| Checkpoint {
            n,
            density: set.count_up_to(n) as f64 / n as f64,
        })
        .collect();
    DensityEstimate {
        estimate: checkpoints[0].density,
        checkpoints,
    }
}

/// ⌊N / 2^i⌋ for i = 0..count, stopping before the value reaches 0.
fn dyadic_checkpoints(horizon: u64, count: usize) -> Vec<u64> {
    (0..count.max(1))
        .map(|i| horizon.checked_shr(i as u32).unwrap_or(0))
        .take_while(|&n| n > 0)
        .collect()
}

/// The intervals (⌊N/2^{i+1}⌋, ⌊N/2^i⌋] for i = 0..count, skipping empty ones.
fn dyadic_intervals(horizon: u64, count: usize) -> Vec<(u64, u64)> {
    let points = dyadic_checkpoints(horizon, count + 1);
    let mut intervals: Vec<(u64, u64)> = points.windows(2).map(|w| (w[1], w[0])).collect();
    if points.len() <= count {
        // Ran out of halvings: the last interval reaches down to 0.
        if let Some(&last) = points.last() {
            intervals.push((0, last));
        }
    }
    intervals.retain(|(lo, hi)| hi > lo);
    intervals
}

/// Symbolic description of a set beyond the observed horizon.
///
/// Every certificate states that the set is contained in some explicitly
/// described superset; membership of that superset in an ideal then
/// implies membership of the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TailCertificate {
    /// No member exceeds `after`.
    Empty { after: u64 },
    /// Every member lies in one of the listed blocks D_j.
    SubsetOfBlocks { blocks: Vec<u32> },
    /// Every member is covered by at least one component.
    SubsetOfUnion { parts: Vec<TailCertificate> },
}

impl TailCertificate {
    pub fn blocks(blocks: impl Into<Vec<u32>>) -> Self {
        Self::SubsetOfBlocks { blocks: blocks.into() }
    }

    pub fn union(parts: impl Into<Vec<TailCertificate>>) -> Self {
        Self::SubsetOfUnion { parts: parts.into() }
    }

    /// Whether `n` is allowed by this description.
    pub fn admits(&self, n: u64) -> bool {
        match self {
            Self::Empty { after } => n <= *after,
            Self::SubsetOfBlocks { blocks } => blocks.contains(&block_index(n)),
            Self::SubsetOfUnion { parts } => parts.iter().any(|p| p.admits(n)),
        }
    }

    /// Whether the described superset is a member of `kind`.
    pub fn implies_membership(&self, kind: &IdealKind) -> bool {
        match self {
            Self::Empty { .. } => true,
            Self::SubsetOfBlocks { blocks } => {
                blocks.is_empty() || matches!(kind, IdealKind::BlockDecomposition { .. })
            }
            Self::SubsetOfUnion { parts } => parts.iter().all(|p| p.implies_membership(kind)),
        }
    }

    /// First member the certificate does not admit.
    pub fn first_violation(&self, set: &IndexSet) -> Option<u64> {
        set.members().iter().copied().find(|&n| !self.admits(n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdealKind {
    /// I_f: finite subsets of ℕ.
    Finite,
    /// I_d: sets of natural density zero, judged against threshold `tau`
    /// over `checkpoints` dyadic partial densities.
    Density {
        #[serde(default = "default_tau")]
        tau: f64,
        #[serde(default = "default_checkpoints")]
        checkpoints: usize,
    },
    /// Sets meeting only finitely many blocks D_j; `window` is the trailing
    /// fraction of the horizon that must show no new block.
    #[serde(rename = "blocks")]
    BlockDecomposition {
        #[serde(default = "default_window")]
        window: f64,
    },
}

fn default_tau() -> f64 {
    DEFAULT_TAU
}

fn default_checkpoints() -> usize {
    DEFAULT_CHECKPOINTS
}

fn default_window() -> f64 {
    DEFAULT_WINDOW
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ideal {
    #[serde(flatten)]
    pub kind: IdealKind,
    /// Trailing fraction of the horizon that must be free of members for a
    /// finite-set verdict.
    #[serde(default = "default_window")]
    pub stabilization: f64,
}

impl Ideal {
    pub fn finite() -> Self {
        Self {
            kind: IdealKind::Finite,
            stabilization: DEFAULT_WINDOW,
        }
    }

    pub fn density() -> Self {
        Self::density_with_tau(DEFAULT_TAU)
    }

    pub fn density_with_tau(tau: f64) -> Self {
        Self {
            kind: IdealKind::Density {
                tau,
                checkpoints: DEFAULT_CHECKPOINTS,
            },
            stabilization: DEFAULT_WINDOW,
        }
    }

    pub fn blocks() -> Self {
        Self {
            kind: IdealKind::BlockDecomposition { window: DEFAULT_WINDOW },
            stabilization: DEFAULT_WINDOW,
        }
    }

    /// The three built-in ideals with default parameters.
    pub fn battery() -> [Ideal; 3] {
        [Self::finite(), Self::density(), Self::blocks()]
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            IdealKind::Finite => "finite",
            IdealKind::Density { .. } => "density",
            IdealKind::BlockDecomposition { .. } => "blocks",
        }
    }

    pub fn validate(&self) -> Result<(), IdealError> {
        let fraction_ok = |w: f64| w > 0.0 && w <= 1.0;
        if !fraction_ok(self.stabilization) {
            return Err(IdealError::InvalidIdeal(format!(
                "stabilization window {} must lie in (0, 1]",
                self.stabilization
            )));
        }
        match self.kind {
            IdealKind::Finite => Ok(()),
            IdealKind::Density { tau, checkpoints } => {
                if !(tau > 0.0 && tau < 0.5) {
                    return Err(IdealError::InvalidIdeal(format!(
                        "density threshold tau = {tau} must lie in (0, 0.5)"
                    )));
                }
                if checkpoints < 1 {
                    return Err(IdealError::InvalidIdeal(
                        "density checkpoints must be at least 1".into(),
                    ));
                }
                Ok(())
            }
            IdealKind::BlockDecomposition { window } => {
                if !fraction_ok(window) {
                    return Err(IdealError::InvalidIdeal(format!(
                        "block window {window} must lie in (0, 1]"
                    )));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            IdealKind::Finite => write!(f, "finite"),
            IdealKind::Density { tau, .. } => write!(f, "density(tau={tau})"),
            IdealKind::BlockDecomposition { window } => write!(f, "blocks(window={window})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    InIdeal,
    NotInIdeal,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMode {
    /// Decided from a tail certificate; holds for the whole infinite set.
    Exact,
    /// Decided from the observed prefix only.
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub horizon: u64,
    pub members: usize,
    pub final_density: f64,
    pub last_member: Option<u64>,
    pub distinct_blocks: Vec<u32>,
    pub trend: Vec<Checkpoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<TailCertificate>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealVerdict {
    pub status: Membership,
    pub mode: VerdictMode,
    pub evidence: Evidence,
}

/// Decides whether `set` (observed up to its horizon) belongs to `ideal`.
///
/// With a certificate that implies membership the verdict is `Exact`.
/// Otherwise the observed prefix is judged empirically:
///
/// * finite: not a member when members occur in every dyadic interval
///   (N/2^{i+1}, N/2^i]; otherwise a member when no element falls in the
///   trailing stabilization window.
/// * density: a member when d_N ≤ τ and the dyadic trend is non-increasing;
///   not a member when d_N ≥ 2τ and the trend is non-decreasing. Trend
///   comparisons allow τ/2 plus one element at the smallest checkpoint.
/// * blocks: not a member when a block index unseen before appears in every
///   dyadic interval; a member when no new block index appears in the
///   trailing window.
///
/// Anything else is `Inconclusive`.
pub fn decide_membership(
    ideal: &Ideal,
    set: &IndexSet,
    certificate: Option<&TailCertificate>,
) -> Result<IdealVerdict, IdealError> {
    ideal.validate()?;
    if let Some(cert) = certificate {
        if let Some(member) = cert.first_violation(set) {
            return Err(IdealError::CertificateViolated { member });
        }
    }

    let horizon = set.horizon();
    let checkpoints = match ideal.kind {
        IdealKind::Density { checkpoints, .. } => checkpoints,
        _ => DEFAULT_CHECKPOINTS,
    };
    let trend = density_trend(set, checkpoints);
    let block_events = new_block_positions(set);
    let mut evidence = Evidence {
        horizon,
        members: set.len(),
        final_density: trend.estimate,
        last_member: set.max(),
        distinct_blocks: block_events
            .iter()
            .map(|&(_, b)| b)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        trend: trend.checkpoints.clone(),
        certificate: None,
        note: String::new(),
    };

    if let Some(cert) = certificate {
        if cert.implies_membership(&ideal.kind) {
            evidence.certificate = Some(cert.clone());
            evidence.note = "tail certificate describes a superset in the ideal".into();
            return Ok(IdealVerdict {
                status: Membership::InIdeal,
                mode: VerdictMode::Exact,
                evidence,
            });
        }
    }

    let intervals = dyadic_intervals(horizon, checkpoints);
    let window_start = trailing_window_start(horizon, ideal.stabilization);

    let (status, note) = match ideal.kind {
        IdealKind::Finite => {
            let everywhere = intervals.iter().all(|&(lo, hi)| set.count_in(lo, hi) > 0);
            let late = set.count_in(window_start, horizon);
            if everywhere {
                (Membership::NotInIdeal, "members in every dyadic interval".to_string())
            } else if late == 0 {
                (
                    Membership::InIdeal,
                    format!("no member in trailing window ({window_start}, {horizon}]"),
                )
            } else {
                (
                    Membership::Inconclusive,
                    format!("{late} members in ({window_start}, {horizon}] but gaps in the dyadic intervals"),
                )
            }
        }
        IdealKind::Density { tau, .. } => {
            let slack = tau / 2.0 + 1.0 / trend.smallest_checkpoint() as f64;
            let d = trend.estimate;
            if d <= tau && trend.is_non_increasing(slack) {
                (
                    Membership::InIdeal,
                    format!("density {d} ≤ tau {tau} with non-increasing trend"),
                )
            } else if d >= 2.0 * tau && trend.is_non_decreasing(slack) {
                (
                    Membership::NotInIdeal,
                    format!("density {d} ≥ 2·tau with non-decreasing trend"),
                )
            } else {
                (
                    Membership::Inconclusive,
                    format!("density {d} with no settled trend against tau {tau}"),
                )
            }
        }
        IdealKind::BlockDecomposition { window } => {
            let block_window_start = trailing_window_start(horizon, window);
            let event_in = |lo: u64, hi: u64| block_events.iter().any(|&(n, _)| n > lo && n <= hi);
            if !intervals.is_empty() && intervals.iter().all(|&(lo, hi)| event_in(lo, hi)) {
                (
                    Membership::NotInIdeal,
                    "a new block index appears in every dyadic interval".to_string(),
                )
            } else if !event_in(block_window_start, horizon) {
                (
                    Membership::InIdeal,
                    format!("no new block index in ({block_window_start}, {horizon}]"),
                )
            } else {
                (
                    Membership::Inconclusive,
                    "new block indices appear late but not in every dyadic interval".to_string(),
                )
            }
        }
    };
    evidence.note = match certificate {
        Some(_) => format!("{note}; certificate does not settle membership in this ideal"),
        None => note,
    };
    Ok(IdealVerdict {
        status,
        mode: VerdictMode::Empirical,
        evidence,
    })
}

/// Decides P ∈ F(I), i.e. ({1..N} ∖ P) ∈ I. `complement_certificate`
/// describes the complement, not `set`.
pub fn filter_contains(
    ideal: &Ideal,
    set: &IndexSet,
    complement_certificate: Option<&TailCertificate>,
) -> Result<IdealVerdict, IdealError> {
    decide_membership(ideal, &set.complement(), complement_certificate)
}

/// (position, block) for each member whose block index was not seen before.
fn new_block_positions(set: &IndexSet) -> Vec<(u64, u32)> {
    let mut seen = BTreeSet::new();
    set.members()
        .iter()
        .filter_map(|&n| {
            let b = block_index(n);
            seen.insert(b).then_some((n, b))
        })
        .collect()
}

fn trailing_window_start(horizon: u64, fraction: f64) -> u64 {
    let width = (horizon as f64 * fraction).ceil() as u64;
    horizon.saturating_sub(width.max(1))
}
