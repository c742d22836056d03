//! The `dnl` label maker: `make`, `validate` and `inspect`.
//!
//! Exit codes are a stable contract: 0 success, 1 error, 2 when the label
//! still needs manual input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod inspect;
mod make;
mod text;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ACTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dnl", version, about = "Build, validate and inspect dataset nutrition labels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile a CSV and write a label.
    Make(MakeArgs),
    /// Check a label against the schema rules.
    Validate {
        label: PathBuf,
    },
    /// Print one module of a label as plain-text tables.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct MakeArgs {
    /// Dataset CSV, or `-` for stdin.
    pub dataset: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated module names. Metadata is always included.
    #[arg(long, value_delimiter = ',', default_value = "metadata,statistics,pair_plots")]
    pub modules: Vec<String>,
    /// Manual-input JSON shaped like a label (`{"modules": {...}}`).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// JSON map of column name to `{"stratum": ..., "subtype": ...}`.
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Pin `generated_at` (RFC 3339).
    #[arg(long)]
    pub timestamp: Option<String>,

    /// Comma-separated missing-value tokens; an empty item stands for the
    /// empty cell.
    #[arg(long)]
    pub missing_tokens: Option<String>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Row bound; 0 disables it.
    #[arg(long, default_value_t = dnl_core::table::DEFAULT_MAX_ROWS)]
    pub max_rows: usize,

    /// Maximum columns for the all-pairs grid.
    #[arg(long, default_value_t = dnl_core::pairs::DEFAULT_PAIR_LIMIT)]
    pub pair_limit: usize,
    /// Explicit pair `a,b`; repeatable. Replaces the all-pairs grid.
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    #[arg(long, default_value_t = dnl_core::pairs::DEFAULT_MAX_BINS)]
    pub max_bins: usize,

    /// Ground-truth CSV.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Ground-truth key column; defaults to its first column.
    #[arg(long)]
    pub gt_key: Option<String>,
    /// Ground-truth demographic columns; defaults to every numeric column.
    #[arg(long, value_delimiter = ',')]
    pub gt_columns: Option<Vec<String>>,
    /// Dataset column joined against the ground-truth key.
    #[arg(long)]
    pub dataset_key: Option<String>,
    /// Dataset columns to aggregate per key.
    #[arg(long, value_delimiter = ',')]
    pub value_column: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "sum")]
    pub aggregates: Vec<String>,

    /// Column whose values are conditioned on.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub target_values: Vec<String>,
    /// Categorical column the posterior is over.
    #[arg(long)]
    pub condition: Option<String>,
    #[arg(long, default_value_t = dnl_core::posterior::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = dnl_core::posterior::DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = dnl_core::posterior::DEFAULT_LEVEL)]
    pub level: f64,
    #[arg(long, default_value_t = dnl_core::posterior::DEFAULT_SYNTHETIC_DRAWS)]
    pub synthetic_draws: usize,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub label: PathBuf,
    /// Module to render; lists the present modules when omitted.
    #[arg(long)]
    pub module: Option<String>,
    /// With `--module pair_plots`, render only the cell for `a,b`.
    #[arg(long)]
    pub pair: Option<String>,
}

/// Runs a parsed command. Data goes to `out`, diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Make(args) => make::run(&args, out, err),
        Command::Validate { label } => validate(&label, out),
        Command::Inspect(args) => inspect::run(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

/// Parses `argv` and runs it. Usage errors exit 1; `--help` and
/// `--version` exit 0.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            }
        }
    }
}

fn validate(path: &PathBuf, out: &mut dyn Write) -> anyhow::Result<i32> {
    let bytes = std::fs::read(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let report = dnl_core::validate(&bytes);
    for v in &report.violations {
        writeln!(out, "{v}")?;
    }
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_ERROR })
}
