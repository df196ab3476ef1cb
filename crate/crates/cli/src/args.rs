use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Evaluate diagnostic assays across disease prevalence.
#[derive(Debug, Parser)]
#[command(name = "assay", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predictive values, false alarms and missed cases at one prevalence
    Metrics(MetricsArgs),
    /// Sweep prevalence and write a table or plot
    Sweep(SweepArgs),
    /// Empirical ROC curve, AUC with DeLong interval and Youden cutoff from a CSV of scores
    Roc(RocArgs),
    /// Write report.json and report.md (and optionally plots)
    Report(ReportArgs),
}

/// Parses a probability given as a fraction ("0.06") or percent ("6%").
pub fn parse_probability(raw: &str) -> Result<f64, String> {
    let raw = raw.trim();
    let value = match raw.strip_suffix('%') {
        Some(pct) => pct
            .trim()
            .parse::<f64>()
            .map(|v| v / 100.0)
            .map_err(|_| format!("{raw:?} is not a percentage"))?,
        None => raw
            .parse::<f64>()
            .map_err(|_| format!("{raw:?} is not a number"))?,
    };
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("{raw} is outside [0, 1] (0%-100%)"))
    }
}

fn parse_confidence(raw: &str) -> Result<f64, String> {
    let v = parse_probability(raw)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{raw} must lie strictly between 0 and 1"))
    }
}

fn parse_cost(raw: &str) -> Result<f64, String> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("{raw:?} is not a non-negative number")),
    }
}

fn parse_delimiter(raw: &str) -> Result<u8, String> {
    match raw {
        "\\t" | "tab" => Ok(b'\t'),
        _ if raw.len() == 1 && raw.is_ascii() => Ok(raw.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got {raw:?}")),
    }
}

/// Sensitivity and specificity, either directly or from validation counts.
#[derive(Debug, Clone, Args)]
pub struct CharacteristicsArgs {
    /// Sensitivity as a fraction or percent
    #[arg(long, value_parser = parse_probability, requires = "spec", conflicts_with_all = ["tp", "fp", "fn_", "tn"])]
    pub sens: Option<f64>,
    /// Specificity as a fraction or percent
    #[arg(long, value_parser = parse_probability, requires = "sens")]
    pub spec: Option<f64>,
    /// True positives of a validation study
    #[arg(long, requires_all = ["fp", "fn_", "tn"])]
    pub tp: Option<u64>,
    #[arg(long, requires_all = ["tp", "fn_", "tn"])]
    pub fp: Option<u64>,
    #[arg(long = "fn", id = "fn_", requires_all = ["tp", "fp", "tn"])]
    pub fn_: Option<u64>,
    #[arg(long, requires_all = ["tp", "fp", "fn_"])]
    pub tn: Option<u64>,
    /// Confidence level for intervals
    #[arg(long, default_value = "0.95", value_parser = parse_confidence)]
    pub confidence: f64,
}

impl CharacteristicsArgs {
    pub fn given(&self) -> bool {
        self.sens.is_some() || self.tp.is_some()
    }
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    /// Cost of one false alarm (any unit)
    #[arg(long = "cost-fa", value_parser = parse_cost, requires = "cost_md")]
    pub cost_fa: Option<f64>,
    /// Cost of one missed case (same unit)
    #[arg(long = "cost-md", value_parser = parse_cost, requires = "cost_fa")]
    pub cost_md: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of evenly spaced grid points
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
    pub steps: u32,
    /// First grid prevalence
    #[arg(long = "from", default_value = "0", value_parser = parse_probability)]
    pub from: f64,
    /// Last grid prevalence
    #[arg(long = "to", default_value = "1", value_parser = parse_probability)]
    pub to: f64,
    /// Explicit comma-separated prevalences, overriding --steps/--from/--to
    #[arg(long, value_delimiter = ',', value_parser = parse_probability, conflicts_with_all = ["steps", "from", "to"])]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[arg(long, default_value = "score")]
    pub score_column: String,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Label value marking diseased samples; every other value is healthy
    #[arg(long, default_value = "1")]
    pub positive_label: String,
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// The file has no header row; columns are then 0-based indices
    #[arg(long)]
    pub no_header: bool,
    /// Lower scores are more disease-like
    #[arg(long)]
    pub invert_scores: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RocFormat {
    Text,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub chars: CharacteristicsArgs,
    /// Prevalence (pre-test probability), e.g. 0.06 or 6%
    #[arg(long, value_parser = parse_probability)]
    pub prev: f64,
    #[command(flatten)]
    pub costs: CostArgs,
    /// Print JSON instead of a table
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub chars: CharacteristicsArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Prevalence to mark with a vertical line
    #[arg(long, value_parser = parse_probability)]
    pub marker: Option<f64>,
    #[command(flatten)]
    pub costs: CostArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub out: SweepFormat,
    /// Write here instead of stdout
    #[arg(long)]
    pub out_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    /// CSV of scored, labeled samples
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
    #[arg(long, default_value = "0.95", value_parser = parse_confidence)]
    pub confidence: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub out: RocFormat,
    #[arg(long)]
    pub out_file: Option<PathBuf>,
    /// Also write a report for the Youden cutoff into this directory
    #[arg(long, requires = "prev")]
    pub report: Option<PathBuf>,
    /// Marker prevalence for --report
    #[arg(long, value_parser = parse_probability)]
    pub prev: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub chars: CharacteristicsArgs,
    /// Expected prevalence in the tested population
    #[arg(long, value_parser = parse_probability)]
    pub prev: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub costs: CostArgs,
    /// Optional CSV of scores; adds the ROC curve, and supplies the Youden
    /// cutoff characteristics when --sens/--spec are absent
    #[arg(long)]
    pub roc_input: Option<PathBuf>,
    #[command(flatten)]
    pub ingest: IngestArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Also write prevalence.svg (and roc.svg with --roc-input)
    #[arg(long)]
    pub plots: bool,
}
