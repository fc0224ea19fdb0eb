use serde::{Deserialize, Serialize};

use super::IdealError;

/// A subset of {1, …, horizon}, held sorted and without repeats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIndexSet")]
pub struct IndexSet {
    horizon: u64,
    members: Vec<u64>,
}

#[derive(Deserialize)]
struct RawIndexSet {
    horizon: u64,
    members: Vec<u64>,
}

impl TryFrom<RawIndexSet> for IndexSet {
    type Error = IdealError;

    fn try_from(raw: RawIndexSet) -> Result<Self, Self::Error> {
        Self::new(raw.horizon, raw.members)
    }
}

impl IndexSet {
    /// Members may arrive in any order; duplicates are dropped.
    pub fn new(horizon: u64, mut members: Vec<u64>) -> Result<Self, IdealError> {
        if horizon == 0 {
            return Err(IdealError::ZeroHorizon);
        }
        if let Some(&bad) = members.iter().find(|&&n| n == 0 || n > horizon) {
            return Err(IdealError::OutOfRange { member: bad, horizon });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { horizon, members })
    }

    pub fn empty(horizon: u64) -> Self {
        assert!(horizon > 0, "horizon must be positive");
        Self {
            horizon,
            members: Vec::new(),
        }
    }

    /// {1, …, horizon}.
    pub fn full(horizon: u64) -> Self {
        Self::from_predicate(horizon, |_| true)
    }

    pub fn from_predicate(horizon: u64, mut keep: impl FnMut(u64) -> bool) -> Self {
        assert!(horizon > 0, "horizon must be positive");
        Self {
            horizon,
            members: (1..=horizon).filter(|&n| keep(n)).collect(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.members.last().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// |P ∩ {1, …, j}|.
    pub fn count_up_to(&self, j: u64) -> usize {
        self.members.partition_point(|&n| n <= j)
    }

    /// Members inside the half-open interval (lo, hi].
    pub fn count_in(&self, lo: u64, hi: u64) -> usize {
        self.count_up_to(hi) - self.count_up_to(lo.min(hi))
    }

    /// {1, …, horizon} ∖ P.
    pub fn complement(&self) -> Self {
        Self::from_predicate(self.horizon, |n| !self.contains(n))
    }

    pub fn union(&self, other: &Self) -> Result<Self, IdealError> {
        self.same_horizon(other)?;
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        Self::new(self.horizon, members)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.iter().all(|&n| other.contains(n))
    }

    /// Keeps the members selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(u64) -> bool) -> Self {
        Self {
            horizon: self.horizon,
            members: self.members.iter().copied().filter(|&n| keep(n)).collect(),
        }
    }

    fn same_horizon(&self, other: &Self) -> Result<(), IdealError> {
        if self.horizon != other.horizon {
            return Err(IdealError::HorizonMismatch {
                left: self.horizon,
                right: other.horizon,
            });
        }
        Ok(())
    }
}
