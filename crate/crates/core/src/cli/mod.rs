//! The `subspace-limits` command line.
//!
//! * `analyze`: runs the five criteria, writes a JSON report and a CSV
//!   trace, and exits 0/1/2 for converges/does not converge/inconclusive.
//! * `suite`: adds the pair-volume check and the agreement matrix; exits 0
//!   when all decisive criteria agree. Also accepts the battery.
//! * `gap`: prints the gap between the spans of two row-per-vector files.
//! * `example`: describes a built-in sequence.
//!
//! Any error exits with [`EXIT_ERROR`].

mod config;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::convergence::{gap_trace, ConvergenceError, Evaluation, OddEscapeVariant, Verdict};
use crate::linalg::{gap, orthonormalize, LinalgError, RealVector};

pub use config::{
    BuiltinName, Experiment, ExperimentConfig, IdealName, OutputSpec, Overrides, SequenceSpec, Target, DEFAULT_HORIZON,
    DEFAULT_REPORT, DEFAULT_TRACE,
};
pub use output::{
    format_full, format_significant, parse_matrix, read_json, write_json, write_trace, write_trace_file,
    AgreementMatrix, AnalysisReport, BatteryReport, BatteryRow, SuiteReport, VerdictRow, TRACE_HEADER,
};

pub const EXIT_ERROR: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Convergence(#[from] ConvergenceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "subspace-limits", version, about = "Ideal convergence of subspace sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Judge convergence with all five criteria and write a report and trace.
    Analyze(RunArgs),
    /// Run the criteria and the pair-volume check, and print the agreement matrix.
    Suite(RunArgs),
    /// Print the gap between the spans of the rows of two files.
    Gap {
        /// Rows spanning U.
        u: PathBuf,
        /// Rows spanning V.
        v: PathBuf,
    },
    /// Describe a built-in sequence.
    Example(ExampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Printed,
    Amended,
}

impl From<VariantArg> for OddEscapeVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Printed => OddEscapeVariant::AsPrinted,
            VariantArg::Amended => OddEscapeVariant::Amended,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in sequence to run instead of a config file.
    pub builtin: Option<BuiltinName>,
    /// JSON experiment description.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Last index evaluated.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Comma-separated, strictly decreasing ε values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub ideal: Option<IdealName>,
    /// Density threshold for the density ideal.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Directory for report and trace files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            horizon: self.horizon,
            eps_grid: self.eps.clone(),
            ideal: self.ideal,
            tau: self.tau,
            out_dir: self.out_dir.clone(),
            variant: self.variant.map(Into::into),
        }
    }
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    pub builtin: BuiltinName,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Number of leading gap values to print.
    #[arg(long, default_value_t = 10)]
    pub show: u64,
}

impl RunArgs {
    pub fn experiment(&self) -> Result<Experiment, CliError> {
        let config = match (&self.builtin, &self.config) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give either a built-in sequence or --config, not both".into(),
                ))
            }
            (Some(name), None) => ExperimentConfig::builtin(*name),
            (None, Some(path)) => ExperimentConfig::load(path)?,
            (None, None) => return Err(CliError::Usage("give a built-in sequence or --config FILE".into())),
        };
        Experiment::resolve(config, &self.common.overrides())
    }
}

pub fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Converges => 0,
        Verdict::DoesNotConverge => 1,
        Verdict::Inconclusive => 2,
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn single(e: &Experiment) -> Result<(&crate::convergence::SubspaceSequence, &crate::linalg::Subspace), CliError> {
    match &e.target {
        Target::Single { sequence, limit } => Ok((sequence, limit)),
        Target::Battery(_) => Err(CliError::Usage("the battery runs under `suite`".into())),
    }
}

fn short(status: crate::ideals::Membership) -> &'static str {
    match status {
        crate::ideals::Membership::InIdeal => "in",
        crate::ideals::Membership::NotInIdeal => "out",
        crate::ideals::Membership::Inconclusive => "?",
    }
}

fn print_summary(r: &AnalysisReport) {
    println!("sequence: {}", r.sequence);
    println!("ideal:    {}", r.ideal);
    println!("horizon:  {}", r.horizon);
    let eps: Vec<String> = r.eps_grid.iter().map(|e| e.to_string()).collect();
    println!(
        "criterion          {}  overall",
        eps.iter()
            .map(|e| format!("{:>8}", format!("ε={e}")))
            .collect::<String>()
    );
    for o in &r.evidence {
        let cells: String = o
            .per_epsilon
            .iter()
            .map(|s| {
                format!(
                    "{:>8}",
                    format!(
                        "{}{}",
                        short(s.status),
                        if s.mode == crate::ideals::VerdictMode::Exact {
                            "*"
                        } else {
                            ""
                        }
                    )
                )
            })
            .collect();
        println!("{:<18} {cells}  {}", o.criterion.as_str(), o.overall);
    }
    println!("(in/out: exceptional set in/out of the ideal, ?: inconclusive, *: exact via certificate)");
    println!("overall:  {}", r.overall);
}

/// Runs the five criteria and writes the report and trace files.
pub fn run_analyze(e: &Experiment) -> Result<AnalysisReport, CliError> {
    let (sequence, limit) = single(e)?;
    let eval = Evaluation::compute(sequence, limit, e.horizon)?;
    let report = AnalysisReport::from(eval.equivalence_suite(&e.ideal, &e.eps_grid)?);
    create_dir(&e.out_dir)?;
    write_json(&report, &e.out_dir.join(&e.report_name))?;
    write_trace_file(eval.records(), &e.out_dir.join(&e.trace_name))?;
    Ok(report)
}

pub enum SuiteOutcome {
    Single(Box<SuiteReport>),
    Battery(BatteryReport),
}

impl SuiteOutcome {
    pub fn agree(&self) -> bool {
        match self {
            Self::Single(r) => r.agreement.agree,
            Self::Battery(b) => b.all_agree,
        }
    }
}

fn member_trace_name(trace_name: &str, member: &str) -> String {
    let path = Path::new(trace_name);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    format!("{stem}-{member}.{ext}")
}

/// Runs the criteria and the pair-volume check and writes the suite report
/// and trace files (one trace per member for the battery).
pub fn run_suite(e: &Experiment) -> Result<SuiteOutcome, CliError> {
    create_dir(&e.out_dir)?;
    match &e.target {
        Target::Single { sequence, limit } => {
            let eval = Evaluation::compute(sequence, limit, e.horizon)?;
            let report = eval.equivalence_suite(&e.ideal, &e.eps_grid)?;
            let suite = SuiteReport {
                agreement: AgreementMatrix::of(&report),
                analysis: AnalysisReport::from(report),
                pair_volume: eval.pair_volume_check(&e.ideal, &e.eps_grid)?,
            };
            write_json(&suite, &e.out_dir.join(&e.report_name))?;
            write_trace_file(eval.records(), &e.out_dir.join(&e.trace_name))?;
            Ok(SuiteOutcome::Single(Box::new(suite)))
        }
        Target::Battery(members) => {
            let mut rows = Vec::with_capacity(members.len());
            for m in members {
                let eval = Evaluation::compute(&m.sequence, &m.limit, e.horizon)?;
                let report = eval.equivalence_suite(&e.ideal, &e.eps_grid)?;
                let pv = eval.pair_volume_check(&e.ideal, &e.eps_grid)?;
                let expected = m.expected_under(&e.ideal);
                rows.push(BatteryRow {
                    name: m.name().to_string(),
                    agree: report.criteria_agree(),
                    matches_expected: report.criteria.iter().all(|c| c.overall == expected),
                    verdicts: report.verdicts(),
                    expected,
                    pair_volume: pv.pair_volume.overall,
                    implication_holds: pv.implication_holds,
                });
                write_trace_file(
                    eval.records(),
                    &e.out_dir.join(member_trace_name(&e.trace_name, m.name())),
                )?;
            }
            let battery = BatteryReport {
                ideal: e.ideal.clone(),
                horizon: e.horizon,
                eps_grid: e.eps_grid.clone(),
                all_agree: rows.iter().all(|r| r.agree),
                members: rows,
            };
            write_json(&battery, &e.out_dir.join(&e.report_name))?;
            Ok(SuiteOutcome::Battery(battery))
        }
    }
}

/// gap(span U, span V) for two row-per-vector files of equal shape.
pub fn run_gap(u: &Path, v: &Path) -> Result<f64, CliError> {
    let read = |p: &Path| -> Result<Vec<Vec<f64>>, CliError> {
        let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?;
        parse_matrix(&text, p)
    };
    let (a, b) = (read(u)?, read(v)?);
    if a[0].len() != b[0].len() || a.len() != b.len() {
        return Err(CliError::Usage(format!(
            "{} is {}×{} but {} is {}×{}",
            u.display(),
            a.len(),
            a[0].len(),
            v.display(),
            b.len(),
            b[0].len()
        )));
    }
    let span = |rows: Vec<Vec<f64>>| -> Result<_, CliError> {
        let vectors = rows.into_iter().map(RealVector::new).collect::<Result<Vec<_>, _>>()?;
        Ok(orthonormalize(&vectors)?)
    };
    Ok(gap(&span(a)?, &span(b)?)?)
}

fn run_example(args: &ExampleArgs) -> Result<(), CliError> {
    let mut config = ExperimentConfig::builtin(args.builtin);
    if let SequenceSpec::Builtin { variant, .. } = &mut config.sequence {
        *variant = args.variant.map_or(OddEscapeVariant::default(), Into::into);
    }
    let e = Experiment::resolve(config, &Overrides::default())?;
    match &e.target {
        Target::Single { sequence, limit } => {
            println!("sequence: {}", sequence.name());
            println!(
                "ambient dimension {}, subspace dimension {}",
                sequence.ambient_dim(),
                sequence.dim()
            );
            for (i, v) in limit.basis().iter().enumerate() {
                println!("limit basis v_{}: {v}", i + 1);
            }
            println!("recommended ideal: {}", e.ideal);
            println!(
                "tail certificate: {}",
                if sequence.certificate_rule().is_some() {
                    "yes"
                } else {
                    "no"
                }
            );
            for (n, g) in gap_trace(sequence, limit, args.show.max(1))? {
                println!("gap(U_{n}, V) = {}", format_significant(g, 12));
            }
        }
        Target::Battery(members) => {
            println!(
                "{:<22} {:>2} {:>2}  expected (finite, density, blocks)",
                "member", "d", "k"
            );
            for m in members {
                let [f, d, b] = m.expected;
                println!(
                    "{:<22} {:>2} {:>2}  {f}, {d}, {b}",
                    m.name(),
                    m.sequence.ambient_dim(),
                    m.sequence.dim()
                );
            }
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Analyze(args) => {
            let e = args.experiment()?;
            let report = run_analyze(&e)?;
            print_summary(&report);
            Ok(exit_code(report.overall))
        }
        Command::Suite(args) => {
            let e = args.experiment()?;
            let outcome = run_suite(&e)?;
            match &outcome {
                SuiteOutcome::Single(s) => {
                    print_summary(&s.analysis);
                    print!("{}", s.agreement.render());
                    println!(
                        "pair volume: {} (implication {}, converse {})",
                        s.pair_volume.pair_volume.overall,
                        if s.pair_volume.implication_holds {
                            "holds"
                        } else {
                            "VIOLATED"
                        },
                        if s.pair_volume.converse_fails {
                            "fails here"
                        } else {
                            "not refuted"
                        }
                    );
                }
                SuiteOutcome::Battery(b) => {
                    println!("ideal: {}  horizon: {}", b.ideal, b.horizon);
                    for r in &b.members {
                        println!(
                            "{:<22} {:<18} agree={} expected={}",
                            r.name,
                            r.verdicts[0].1.as_str(),
                            r.agree,
                            if r.matches_expected { "yes" } else { "NO" }
                        );
                    }
                }
            }
            println!("criteria agree: {}", outcome.agree());
            Ok(if outcome.agree() { 0 } else { 1 })
        }
        Command::Gap { u, v } => {
            println!("{}", format_significant(run_gap(u, v)?, 12));
            Ok(0)
        }
        Command::Example(args) => {
            run_example(args)?;
            Ok(0)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
