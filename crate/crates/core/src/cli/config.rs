use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::convergence::{
    battery, odd_escape, orthogonal_constant, validate_eps_grid, BatteryMember, OddEscapeVariant, SubspaceSequence,
    TiltFamily, DEFAULT_EPS_GRID,
};
use crate::ideals::{Ideal, IdealKind, MIN_DENSITY_HORIZON};
use crate::linalg::{orthonormalize, RealVector, Subspace};

use super::CliError;

pub const DEFAULT_HORIZON: u64 = 1000;
pub const DEFAULT_REPORT: &str = "report.json";
pub const DEFAULT_TRACE: &str = "trace.csv";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinName {
    OddEscape,
    OrthogonalConstant,
    Battery,
}

impl fmt::Display for BuiltinName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OddEscape => "odd-escape",
            Self::OrthogonalConstant => "orthogonal-constant",
            Self::Battery => "battery",
        })
    }
}

/// Where the sequence comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SequenceSpec {
    Builtin {
        name: BuiltinName,
        #[serde(default)]
        variant: OddEscapeVariant,
    },
    /// U_n = span of `basis` for every n.
    Constant {
        #[serde(default = "default_constant_name")]
        name: String,
        basis: Vec<Vec<f64>>,
    },
    Tilt(TiltFamily),
}

fn default_constant_name() -> String {
    "constant".into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub trace: Option<String>,
}

/// The JSON experiment description. Everything but `sequence` is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sequence: SequenceSpec,
    /// Basis rows of the candidate limit V; orthonormalized on load.
    #[serde(default)]
    pub limit: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub ideal: Option<Ideal>,
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn builtin(name: BuiltinName) -> Self {
        Self {
            sequence: SequenceSpec::Builtin {
                name,
                variant: OddEscapeVariant::default(),
            },
            limit: None,
            ideal: None,
            horizon: None,
            eps_grid: None,
            output: OutputSpec::default(),
        }
    }

    /// Parses JSON; errors name the offending field path.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config {
                field: if path == "." { "<root>".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub eps_grid: Option<Vec<f64>>,
    pub ideal: Option<IdealName>,
    pub tau: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub variant: Option<OddEscapeVariant>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum IdealName {
    Finite,
    Density,
    Blocks,
}

impl IdealName {
    pub fn ideal(self) -> Ideal {
        match self {
            Self::Finite => Ideal::finite(),
            Self::Density => Ideal::density(),
            Self::Blocks => Ideal::blocks(),
        }
    }
}

pub enum Target {
    Single {
        sequence: SubspaceSequence,
        limit: Subspace,
    },
    Battery(Vec<BatteryMember>),
}

/// A validated experiment, ready to run.
pub struct Experiment {
    pub label: String,
    pub target: Target,
    pub ideal: Ideal,
    pub horizon: u64,
    pub eps_grid: Vec<f64>,
    pub out_dir: PathBuf,
    pub report_name: String,
    pub trace_name: String,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn subspace_from_rows(field: &str, rows: &[Vec<f64>]) -> Result<Subspace, CliError> {
    let vectors = rows
        .iter()
        .enumerate()
        .map(|(i, r)| RealVector::new(r.clone()).map_err(|e| invalid(&format!("{field}[{i}]"), e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    orthonormalize(&vectors).map_err(|e| invalid(field, e.to_string()))
}

impl Experiment {
    pub fn resolve(config: ExperimentConfig, overrides: &Overrides) -> Result<Self, CliError> {
        let horizon = overrides.horizon.or(config.horizon).unwrap_or(DEFAULT_HORIZON);
        if horizon < MIN_DENSITY_HORIZON {
            return Err(invalid(
                "horizon",
                format!("must be at least {MIN_DENSITY_HORIZON}, got {horizon}"),
            ));
        }

        let eps_grid = overrides
            .eps_grid
            .clone()
            .or(config.eps_grid)
            .unwrap_or_else(|| DEFAULT_EPS_GRID.to_vec());
        validate_eps_grid(&eps_grid).map_err(|e| invalid("eps_grid", e.to_string()))?;
        if let Some(w) = eps_grid.windows(2).find(|w| w[1] >= w[0]) {
            return Err(invalid(
                "eps_grid",
                format!("values must be strictly decreasing, got {} then {}", w[0], w[1]),
            ));
        }

        let (label, target, recommended) = match config.sequence {
            SequenceSpec::Builtin { name, variant } => {
                let variant = overrides.variant.unwrap_or(variant);
                match name {
                    BuiltinName::Battery => (name.to_string(), Target::Battery(battery()), Ideal::finite()),
                    BuiltinName::OddEscape | BuiltinName::OrthogonalConstant => {
                        let ex = if name == BuiltinName::OddEscape {
                            odd_escape(variant)
                        } else {
                            orthogonal_constant()
                        };
                        (
                            ex.sequence.name().to_string(),
                            Target::Single {
                                sequence: ex.sequence,
                                limit: ex.limit,
                            },
                            ex.ideal,
                        )
                    }
                }
            }
            SequenceSpec::Constant { name, basis } => {
                let u = subspace_from_rows("sequence.basis", &basis)?;
                (
                    name.clone(),
                    Target::Single {
                        sequence: SubspaceSequence::constant(name, u.clone()),
                        limit: u,
                    },
                    Ideal::finite(),
                )
            }
            SequenceSpec::Tilt(family) => {
                let sequence = family.sequence().map_err(|e| invalid("sequence", e.to_string()))?;
                let limit = family.limit().map_err(|e| invalid("sequence", e.to_string()))?;
                (family.name.clone(), Target::Single { sequence, limit }, Ideal::finite())
            }
        };

        let target = match (target, config.limit) {
            (Target::Single { sequence, .. }, Some(rows)) => {
                let limit = subspace_from_rows("limit", &rows)?;
                if (limit.ambient_dim(), limit.dim()) != (sequence.ambient_dim(), sequence.dim()) {
                    return Err(invalid(
                        "limit",
                        format!(
                            "spans a {}-dimensional subspace of R^{}, the sequence is {}-dimensional in R^{}",
                            limit.dim(),
                            limit.ambient_dim(),
                            sequence.dim(),
                            sequence.ambient_dim()
                        ),
                    ));
                }
                Target::Single { sequence, limit }
            }
            (Target::Battery(_), Some(_)) => {
                return Err(invalid("limit", "the battery supplies its own limits"));
            }
            (target, None) => target,
        };

        let mut ideal = match overrides.ideal {
            Some(name) => name.ideal(),
            None => config.ideal.unwrap_or(recommended),
        };
        if let Some(t) = overrides.tau {
            match &mut ideal.kind {
                IdealKind::Density { tau, .. } => *tau = t,
                _ => return Err(invalid("tau", "applies only to the density ideal")),
            }
        }
        ideal.validate().map_err(|e| invalid("ideal", e.to_string()))?;

        Ok(Self {
            label,
            target,
            ideal,
            horizon,
            eps_grid,
            out_dir: overrides
                .out_dir
                .clone()
                .or(config.output.dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            report_name: config.output.report.unwrap_or_else(|| DEFAULT_REPORT.into()),
            trace_name: config.output.trace.unwrap_or_else(|| DEFAULT_TRACE.into()),
        })
    }
}
