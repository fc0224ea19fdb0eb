use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::convergence::{ConvergenceReport, Criterion, CriterionOutcome, PairVolumeReport, PointwiseRecord, Verdict};
use crate::ideals::{Ideal, Membership, VerdictMode};

use super::CliError;

pub const TRACE_HEADER: &str = "n,gap,crit2_max_i,crit3_min_i,crit4_min_i,crit5_max_i";

/// 17 significant digits, enough to round-trip any f64.
pub fn format_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// `digits` significant digits, in the style of C's `%g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let digits = digits.max(1);
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = trim_zeros(mantissa);
        let e: i32 = e.parse().expect("integer exponent");
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fold(values: &[f64], init: f64, f: fn(f64, f64) -> f64) -> f64 {
    values.iter().copied().fold(init, f)
}

/// Per-n worst case over the basis vectors for each criterion.
pub fn write_trace(records: &[PointwiseRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            format_full(r.gap),
            format_full(fold(&r.residual, f64::NEG_INFINITY, f64::max)),
            format_full(fold(&r.coefficient_mass, f64::INFINITY, f64::min)),
            format_full(fold(&r.projection_norm, f64::INFINITY, f64::min)),
            format_full(fold(&r.volume, f64::NEG_INFINITY, f64::max)),
        )?;
    }
    Ok(())
}

pub fn write_trace_file(records: &[PointwiseRecord], path: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    write_trace(records, &mut file).map_err(io)?;
    file.flush().map_err(io)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
        field: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

/// One criterion at one ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub criterion: Criterion,
    pub epsilon: f64,
    pub status: Membership,
    pub mode: VerdictMode,
    pub exceptional_count: usize,
    pub final_density: f64,
}

fn verdict_rows(criteria: &[CriterionOutcome]) -> Vec<VerdictRow> {
    criteria
        .iter()
        .flat_map(|c| {
            c.per_epsilon.iter().map(move |e| VerdictRow {
                criterion: c.criterion,
                epsilon: e.epsilon,
                status: e.status,
                mode: e.mode,
                exceptional_count: e.max_exceptional,
                final_density: e.max_final_density,
            })
        })
        .collect()
}

/// The file written by `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub sequence: String,
    pub ideal: Ideal,
    pub horizon: u64,
    pub eps_grid: Vec<f64>,
    pub rows: Vec<VerdictRow>,
    pub criteria: Vec<(Criterion, Verdict)>,
    pub overall: Verdict,
    pub evidence: Vec<CriterionOutcome>,
}

impl From<ConvergenceReport> for AnalysisReport {
    fn from(r: ConvergenceReport) -> Self {
        Self {
            rows: verdict_rows(&r.criteria),
            criteria: r.verdicts(),
            sequence: r.sequence,
            ideal: r.ideal,
            horizon: r.horizon,
            eps_grid: r.eps_grid,
            overall: r.overall,
            evidence: r.criteria,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub labels: Vec<Criterion>,
    pub verdicts: Vec<Verdict>,
    pub matrix: Vec<Vec<bool>>,
    /// All decisive verdicts coincide.
    pub agree: bool,
}

impl AgreementMatrix {
    pub fn of(report: &ConvergenceReport) -> Self {
        Self {
            labels: report.criteria.iter().map(|c| c.criterion).collect(),
            verdicts: report.criteria.iter().map(|c| c.overall).collect(),
            matrix: report.agreement.clone(),
            agree: report.criteria_agree(),
        }
    }

    pub fn render(&self) -> String {
        let width = self.labels.iter().map(|l| l.as_str().len()).max().unwrap_or(0);
        let mut s = format!("{:width$}", "");
        for (j, _) in self.labels.iter().enumerate() {
            s.push_str(&format!(" {:>3}", j + 1));
        }
        s.push('\n');
        for (i, label) in self.labels.iter().enumerate() {
            s.push_str(&format!("{:width$}", label.as_str()));
            for &same in &self.matrix[i] {
                s.push_str(if same { "   =" } else { "   x" });
            }
            s.push_str(&format!("   {}\n", self.verdicts[i]));
        }
        s
    }
}

/// The file written by `suite` for a single sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub analysis: AnalysisReport,
    pub agreement: AgreementMatrix,
    pub pair_volume: PairVolumeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub name: String,
    pub verdicts: Vec<(Criterion, Verdict)>,
    pub expected: Verdict,
    pub agree: bool,
    pub matches_expected: bool,
    pub pair_volume: Verdict,
    pub implication_holds: bool,
}

/// The file written by `suite` for the battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub ideal: Ideal,
    pub horizon: u64,
    pub eps_grid: Vec<f64>,
    pub members: Vec<BatteryRow>,
    pub all_agree: bool,
}

/// Reads a row-per-vector matrix: numbers separated by whitespace or
/// commas, with blank lines and `#` comments ignored.
pub fn parse_matrix(text: &str, path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| CliError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("`{t}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("{} columns, expected {first}", row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "no rows".into(),
        });
    }
    Ok(rows)
}
