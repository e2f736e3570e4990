//! Command-line front end of the `xscore` binary.
//!
//! Every subcommand produces a [`Report`]: a versioned JSON document (or a
//! plain table) holding the configuration echo, the records, warnings and
//! timing. Exit codes: 0 success, 1 input or parse error, 2 query false,
//! 3 budget exceeded, 4 external classifier failure, 5 zero probability mass.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use report::{put_rational, write_atomic, Report, SCHEMA};

use crate::error::Error;
use crate::games::DEFAULT_BUDGET;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "xscore",
    version,
    about = "Score-based explanations for query answers and classifier outputs"
)]
pub struct Cli {
    /// Maximum number of evaluations an exact enumeration may perform.
    #[arg(long, global = true, env = "XSCORE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    /// Seed for sampling-based estimates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Score database tuples as explanations of a Boolean query answer.
    DbScores(DbScoresArgs),
    /// Score the feature values of a classified entity.
    MlScores(MlScoresArgs),
    /// Report whether a query is hierarchical and its Shapley complexity class.
    Analyze(QueryInput),
    /// Print the lineage of a query over a database.
    Lineage(LineageArgs),
    /// Answer label requests for a truth table over standard streams.
    #[command(hide = true)]
    ServeTable {
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct QueryInput {
    /// Query text, e.g. `Q() :- R(x, y), S(y)`.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long)]
    pub query_file: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DatabaseInput {
    /// Relation and its CSV file, as `NAME=PATH`. Repeat for each relation.
    #[arg(long = "relation", value_name = "NAME=PATH")]
    pub relations: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct LineageArgs {
    #[command(flatten)]
    pub db: DatabaseInput,
    #[command(flatten)]
    pub query: QueryInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum DbKind {
    Responsibility,
    CausalEffect,
    Shapley,
    Banzhaf,
}

#[derive(Debug, Args, Serialize)]
pub struct DbScoresArgs {
    #[command(flatten)]
    pub db: DatabaseInput,

    #[arg(long, conflicts_with_all = ["query_file", "lineage", "lineage_file"])]
    pub query: Option<String>,
    #[arg(long, conflicts_with_all = ["lineage", "lineage_file"])]
    pub query_file: Option<PathBuf>,
    /// Lineage formula over tuple ids, e.g. `t1 | (t2 & t3)`.
    #[arg(long, conflicts_with = "lineage_file")]
    pub lineage: Option<String>,
    #[arg(long)]
    pub lineage_file: Option<PathBuf>,

    /// Scores to compute; defaults to all four.
    #[arg(long = "kind", value_enum, value_delimiter = ',')]
    pub kinds: Vec<DbKind>,

    /// Only report these tuples, given by id (`R:1`) or as a fact (`R(a,b)`).
    #[arg(long = "tuple")]
    pub tuples: Vec<String>,

    /// Omit zero scores.
    #[arg(long)]
    pub nonzero: bool,

    /// Estimate Shapley and Banzhaf values by sampling.
    #[arg(long)]
    pub monte_carlo: bool,
    #[arg(long, requires = "monte_carlo", default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, requires = "monte_carlo", default_value_t = 0.05)]
    pub delta: f64,

    /// Presence probability of tuples without an override, for causal effects.
    #[arg(long, default_value = "1/2")]
    pub default_prob: String,
    /// Per-tuple presence probability, as `ID=P`.
    #[arg(long = "tuple-prob", value_name = "ID=P")]
    pub tuple_probs: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MlKind {
    Shap,
    Counter,
    Resp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Uniform,
    Empirical,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RespSemanticsArg {
    JointChange,
    Strict,
}

#[derive(Debug, Args, Serialize)]
pub struct MlScoresArgs {
    /// Classifier given as a complete truth table (CSV with a `label` column).
    #[arg(long, conflicts_with = "external")]
    pub truth_table: Option<PathBuf>,
    /// Program implementing the line protocol of an external classifier.
    #[arg(long)]
    pub external: Option<PathBuf>,
    /// Argument passed to the external program. Repeatable.
    #[arg(
        long = "external-arg",
        requires = "external",
        allow_hyphen_values = true
    )]
    pub external_args: Vec<String>,
    /// Do not cache labels from the external classifier.
    #[arg(long, requires = "external")]
    pub nondeterministic: bool,

    /// Feature names, in order. Taken from the truth table or sample when omitted.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,

    /// The entity to explain, one 0/1 character per feature (`011`).
    #[arg(long)]
    pub entity: String,

    /// Scores to compute; defaults to all three.
    #[arg(long = "kind", value_enum, value_delimiter = ',')]
    pub kinds: Vec<MlKind>,

    #[arg(long, value_enum, default_value_t = DistributionKind::Uniform)]
    pub distribution: DistributionKind,
    /// Sample CSV (0/1 feature columns, optional `_label`).
    #[arg(long)]
    pub sample: Option<PathBuf>,
    /// Count repeated sample entities once instead of failing.
    #[arg(long)]
    pub dedupe: bool,
    /// Marginals `P(F_i = 1)` for the product distribution, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub marginals: Vec<String>,

    /// Constraint the distribution is conditioned on. Repeatable.
    #[arg(long = "constraint")]
    pub constraints: Vec<String>,
    /// File with one constraint per line.
    #[arg(long)]
    pub constraint_file: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = RespSemanticsArg::JointChange)]
    pub resp_semantics: RespSemanticsArg,
    /// Largest contingency set searched by RESP (default: number of features - 1).
    #[arg(long)]
    pub max_contingency: Option<usize>,
    /// Leave zero-mass conditioning events out of SHAP sums, with a warning.
    #[arg(long)]
    pub skip_zero_mass: bool,

    /// Omit zero scores.
    #[arg(long)]
    pub nonzero: bool,
}

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::QueryFalse => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::Protocol(_) => 4,
        Error::ZeroMass(_) | Error::InconsistentConstraint(_) => 5,
        _ => 1,
    }
}

/// Runs one parsed invocation and returns its report, or `None` for
/// subcommands that do not produce one.
pub fn execute(cli: &Cli) -> crate::Result<Option<Report>> {
    let start = Instant::now();
    let config = serde_json::to_value(cli).expect("arguments serialize");
    let mut report = match &cli.command {
        Command::DbScores(args) => commands::db_scores(cli, args, config)?,
        Command::MlScores(args) => commands::ml_scores(cli, args, config)?,
        Command::Analyze(args) => commands::analyze(args, config)?,
        Command::Lineage(args) => commands::lineage(args, config)?,
        Command::ServeTable { table } => {
            commands::serve_table(table)?;
            return Ok(None);
        }
    };
    report.set_elapsed(start.elapsed());
    Ok(Some(report))
}

fn emit(cli: &Cli, report: &Report) -> crate::Result<()> {
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    };
    match &cli.output {
        Some(path) => write_atomic(path, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli).and_then(|r| r.map_or(Ok(()), |r| emit(&cli, &r))) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xscore: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    run(std::env::args_os())
}
