use serde::{Deserialize, Serialize};

use crate::ideals::{block_index, TailCertificate};
use crate::linalg::{LinalgError, RealVector, Subspace};

use super::{ConvergenceError, SubspaceSequence};

/// n ↦ θ(n), the tilt angle of one basis vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AngleProfile {
    Zero,
    Constant {
        angle: f64,
    },
    /// scale · ratio^n.
    Geometric {
        scale: f64,
        ratio: f64,
    },
    /// scale / n^exponent.
    Power {
        scale: f64,
        exponent: f64,
    },
    /// center + amplitude · sin n.
    Wobble {
        center: f64,
        amplitude: f64,
    },
}

impl AngleProfile {
    pub fn angle(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            Self::Zero => 0.0,
            Self::Constant { angle } => angle,
            Self::Geometric { scale, ratio } => scale * ratio.powf(x),
            Self::Power { scale, exponent } => scale / x.powf(exponent),
            Self::Wobble { center, amplitude } => center + amplitude * x.sin(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Self::Zero => true,
            Self::Constant { angle } => angle == 0.0,
            Self::Geometric { scale, .. } | Self::Power { scale, .. } => scale == 0.0,
            Self::Wobble { center, amplitude } => center == 0.0 && amplitude == 0.0,
        }
    }

    fn validate(&self) -> Result<(), String> {
        let params: &[f64] = match self {
            Self::Zero => &[],
            Self::Constant { angle } => &[*angle],
            Self::Geometric { scale, ratio } => &[*scale, *ratio],
            Self::Power { scale, exponent } => &[*scale, *exponent],
            Self::Wobble { center, amplitude } => &[*center, *amplitude],
        };
        if params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            Err(format!("non-finite parameter in {self:?}"))
        }
    }

    /// Some N with |θ(n)| < bound for every n > N, when one exists in closed form.
    fn tail_bound(&self, bound: f64) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        match *self {
            Self::Zero => Some(0),
            Self::Constant { angle } => (angle.abs() < bound).then_some(0),
            Self::Wobble { center, amplitude } => (center.abs() + amplitude.abs() < bound).then_some(0),
            Self::Geometric { scale, ratio } => {
                let r = ratio.abs();
                if r == 0.0 {
                    Some(0)
                } else if r < 1.0 {
                    let n = ((bound / scale.abs()).ln() / r.ln()).ceil();
                    Some(n.max(0.0) as u64)
                } else {
                    None
                }
            }
            Self::Power { scale, exponent } => (exponent > 0.0).then(|| {
                let n = (scale.abs() / bound).powf(1.0 / exponent).ceil();
                n.max(0.0) as u64
            }),
        }
    }
}

/// The indices at which the on-support angles apply.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Support {
    #[default]
    All,
    Evens,
    Odds,
    Multiples {
        of: u64,
    },
    /// Powers of two that are at least `min`.
    PowersOfTwo {
        min: u64,
    },
    /// Indices whose block index is listed.
    Blocks {
        blocks: Vec<u32>,
    },
    UpTo {
        last: u64,
    },
}

impl Support {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            Self::All => true,
            Self::Evens => n % 2 == 0,
            Self::Odds => n % 2 == 1,
            Self::Multiples { of } => n % of == 0,
            Self::PowersOfTwo { min } => n.is_power_of_two() && n >= *min,
            Self::Blocks { blocks } => blocks.contains(&block_index(n)),
            Self::UpTo { last } => n <= *last,
        }
    }

    /// A superset of the support with a symbolic description.
    fn certificate(&self) -> Option<TailCertificate> {
        match self {
            Self::Odds => Some(TailCertificate::blocks([1])),
            Self::Blocks { blocks } => Some(TailCertificate::blocks(blocks.clone())),
            Self::UpTo { last } => Some(TailCertificate::Empty { after: *last }),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            Self::Multiples { of: 0 } => Err("support multiples of 0".into()),
            Self::Blocks { blocks } if blocks.contains(&0) => Err("block indices start at 1".into()),
            _ => Ok(()),
        }
    }
}

fn default_name() -> String {
    "tilt".into()
}

fn default_true() -> bool {
    true
}

/// Sequences obtained by tilting the limit V = span{F e_1, …, F e_k} in ℝ^d.
///
/// Basis vector i of U_n is cos θ_i(n) F e_i + sin θ_i(n) F e_t, where each
/// vector that ever tilts owns its own direction e_t outside the first k, so
/// gap(U_n, V) = max_i |sin θ_i(n)|. F is the identity or a fixed rotation
/// (`frame`), and `mix_basis` replaces each basis of U_n by a fixed
/// orthogonal combination of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiltFamily {
    #[serde(default = "default_name")]
    pub name: String,
    pub ambient_dim: usize,
    pub dim: usize,
    /// One profile per basis vector, used for n in the support.
    pub angles: Vec<AngleProfile>,
    #[serde(default)]
    pub support: Support,
    /// Profiles used off the support; all zero when absent.
    #[serde(default)]
    pub off_support: Option<Vec<AngleProfile>>,
    #[serde(default)]
    pub mix_basis: bool,
    #[serde(default)]
    pub frame: bool,
    /// Attach closed-form tail certificates where they exist.
    #[serde(default = "default_true")]
    pub certify: bool,
}

impl TiltFamily {
    pub fn new(name: impl Into<String>, ambient_dim: usize, angles: Vec<AngleProfile>) -> Self {
        Self {
            name: name.into(),
            ambient_dim,
            dim: angles.len(),
            angles,
            support: Support::All,
            off_support: None,
            mix_basis: false,
            frame: false,
            certify: true,
        }
    }

    pub fn on(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn otherwise(mut self, off_support: Vec<AngleProfile>) -> Self {
        self.off_support = Some(off_support);
        self
    }

    pub fn mixed(mut self) -> Self {
        self.mix_basis = true;
        self
    }

    pub fn framed(mut self) -> Self {
        self.frame = true;
        self
    }

    pub fn uncertified(mut self) -> Self {
        self.certify = false;
        self
    }

    pub fn validate(&self) -> Result<(), ConvergenceError> {
        let bad = |msg: String| Err(ConvergenceError::InvalidSequence(msg));
        if self.dim == 0 || self.dim > self.ambient_dim {
            return bad(format!("dim {} must be in 1..={}", self.dim, self.ambient_dim));
        }
        if self.angles.len() != self.dim {
            return bad(format!("{} angle profiles for dim {}", self.angles.len(), self.dim));
        }
        if let Some(off) = &self.off_support {
            if off.len() != self.dim {
                return bad(format!("{} off-support profiles for dim {}", off.len(), self.dim));
            }
        }
        for p in self.angles.iter().chain(self.off_support.iter().flatten()) {
            p.validate().or_else(bad)?;
        }
        self.support.validate().or_else(bad)?;
        let tilted = self.tilted_components().len();
        if tilted > self.ambient_dim - self.dim {
            return bad(format!(
                "{tilted} tilting vectors need {} spare dimensions, R^{} has {}",
                tilted,
                self.ambient_dim,
                self.ambient_dim - self.dim
            ));
        }
        Ok(())
    }

    fn off_profile(&self, i: usize) -> AngleProfile {
        self.off_support
            .as_ref()
            .map_or(AngleProfile::Zero, |off| off[i].clone())
    }

    fn tilted_components(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| !self.angles[i].is_zero() || !self.off_profile(i).is_zero())
            .collect()
    }

    pub fn angle(&self, i: usize, n: u64) -> f64 {
        if self.support.contains(n) {
            self.angles[i].angle(n)
        } else {
            self.off_profile(i).angle(n)
        }
    }

    /// max_i |sin θ_i(n)|.
    pub fn exact_gap(&self, n: u64) -> f64 {
        (0..self.dim).map(|i| self.angle(i, n).sin().abs()).fold(0.0, f64::max)
    }

    fn frame_columns(&self) -> Vec<RealVector> {
        let columns = if self.frame {
            givens_frame(self.ambient_dim, 0.3)
        } else {
            identity(self.ambient_dim)
        };
        columns
            .into_iter()
            .map(|c| RealVector::new(c).expect("finite frame"))
            .collect()
    }

    pub fn limit(&self) -> Result<Subspace, ConvergenceError> {
        self.validate()?;
        let columns = self.frame_columns();
        Ok(Subspace::from_orthonormal(columns[..self.dim].to_vec())?)
    }

    /// Some superset of {n : max_i |θ_i(n)| ≥ bound}, described symbolically.
    fn exceptional_certificate(&self, bound: f64) -> Option<TailCertificate> {
        let on_tail = self
            .angles
            .iter()
            .map(|p| p.tail_bound(bound))
            .collect::<Option<Vec<_>>>();
        let on = match on_tail {
            Some(ns) => TailCertificate::Empty {
                after: ns.into_iter().max().unwrap_or(0),
            },
            None => self.support.certificate()?,
        };
        if self.support == Support::All {
            return Some(on);
        }
        let off_after = (0..self.dim)
            .map(|i| self.off_profile(i).tail_bound(bound))
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        Some(match on {
            TailCertificate::Empty { after } => TailCertificate::Empty {
                after: after.max(off_after),
            },
            other => TailCertificate::union([other, TailCertificate::Empty { after: off_after }]),
        })
    }

    pub fn sequence(&self) -> Result<SubspaceSequence, ConvergenceError> {
        self.validate()?;
        let family = self.clone();
        let columns = self.frame_columns();
        let slots: Vec<Option<usize>> = {
            let tilted = self.tilted_components();
            (0..self.dim)
                .map(|i| tilted.iter().position(|&t| t == i).map(|r| self.dim + r))
                .collect()
        };
        let mix = (self.mix_basis && self.dim > 1).then(|| transpose(&givens_frame(self.dim, 0.7)));
        let rule = move |n: u64| -> Result<Subspace, LinalgError> {
            let basis = (0..family.dim)
                .map(|i| {
                    let base = &columns[i];
                    match slots[i] {
                        None => Ok(base.clone()),
                        Some(t) => {
                            let theta = family.angle(i, n);
                            base.scaled(theta.cos()).add(&columns[t].scaled(theta.sin()))
                        }
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let u = Subspace::from_orthonormal(basis)?;
            match &mix {
                Some(q) => u.rotate_basis(q),
                None => Ok(u),
            }
        };
        let seq = SubspaceSequence::new(self.name.clone(), self.ambient_dim, self.dim, rule);
        if !self.certify {
            return Ok(seq);
        }
        let family = self.clone();
        Ok(seq.with_partial_certificate(move |eps| family.exceptional_certificate(eps / 2.0)))
    }

    /// Whether a certificate exists for every ε in the grid.
    pub fn certified_for(&self, eps_grid: &[f64]) -> bool {
        self.certify
            && eps_grid
                .iter()
                .all(|&e| self.exceptional_certificate(e / 2.0).is_some())
    }
}

fn identity(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Columns of G_{d−2} ⋯ G_0, where G_j rotates coordinates j, j+1 by
/// base + 0.1 j radians.
fn givens_frame(d: usize, base: f64) -> Vec<Vec<f64>> {
    let mut columns = identity(d);
    for j in 0..d.saturating_sub(1) {
        let (s, c) = (base + 0.1 * j as f64).sin_cos();
        for col in &mut columns {
            let (x, y) = (col[j], col[j + 1]);
            col[j] = c * x - s * y;
            col[j + 1] = s * x + c * y;
        }
    }
    columns
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect()
}
