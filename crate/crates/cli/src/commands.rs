use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use assay_core::metrics::{breakeven_prevalence, characteristics_from_matrix, translate};
use assay_core::report::percent;
use assay_core::roc::{auc_ci_delong, characteristics_at_point, empirical_roc, youden_optimal_point};
use assay_core::sweep::{curve_to_table, sweep};
use assay_core::{
    build_report, parse_samples_csv, render_prevalence_plot, render_roc_plot, report_to_json,
    report_to_markdown, ConfusionMatrix, CostWeights, CsvIngestConfig, PlotOptions,
    PrevalenceGrid, Probability, RocCurve, ScoredSample, TestCharacteristics,
    TranslatedPerformance,
};
use serde_json::json;
use thiserror::Error;

use crate::args::{
    CharacteristicsArgs, CostArgs, GridArgs, IngestArgs, MetricsArgs, ReportArgs, RocArgs,
    RocFormat, SweepArgs, SweepFormat,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] assay_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn characteristics(args: &CharacteristicsArgs) -> Result<TestCharacteristics> {
    match (args.sens, args.spec, args.tp, args.fp, args.fn_, args.tn) {
        (Some(sens), Some(spec), ..) => Ok(TestCharacteristics::from_values(sens, spec)?),
        (_, _, Some(tp), Some(fp), Some(fn_), Some(tn)) => Ok(characteristics_from_matrix(
            &ConfusionMatrix::new(tp, fp, fn_, tn),
            args.confidence,
        )?),
        _ => Err(CliError::Usage(
            "give either --sens and --spec, or --tp --fp --fn --tn".to_string(),
        )),
    }
}

fn costs(args: &CostArgs) -> Result<Option<CostWeights>> {
    match (args.cost_fa, args.cost_md) {
        (Some(fa), Some(md)) => Ok(Some(CostWeights::new(fa, md)?)),
        _ => Ok(None),
    }
}

fn grid(args: &GridArgs) -> Result<PrevalenceGrid> {
    let grid = match &args.grid {
        Some(points) => PrevalenceGrid::explicit(
            points
                .iter()
                .map(|&v| Probability::new(v))
                .collect::<std::result::Result<_, _>>()?,
        ),
        None => PrevalenceGrid::linear(
            Probability::new(args.from)?,
            Probability::new(args.to)?,
            args.steps as usize,
        ),
    };
    grid.map_err(|e| CliError::Usage(e.to_string()))
}

fn ingest_config(args: &IngestArgs) -> CsvIngestConfig {
    CsvIngestConfig {
        score_column: args.score_column.clone(),
        label_column: args.label_column.clone(),
        positive_label: args.positive_label.clone(),
        delimiter: args.delimiter,
        has_header: !args.no_header,
        invert_scores: args.invert_scores,
    }
}

fn read_samples(path: &Path, args: &IngestArgs) -> Result<Vec<ScoredSample>> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_samples_csv(io::BufReader::new(file), &ingest_config(args)).map_err(|e| match e {
        assay_core::Error::Csv(msg) => CliError::Domain(assay_core::Error::Csv(format!(
            "{}: {msg}",
            path.display()
        ))),
        other => other.into(),
    })
}

/// Writes to the file when given, stdout otherwise.
fn emit(text: &str, out_file: Option<&Path>) -> Result<()> {
    match out_file {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

fn fmt_opt_percent(p: Option<Probability>) -> String {
    p.map(|v| format!("{:<6} ({})", percent(v), v.value()))
        .unwrap_or_else(|| "undefined".to_string())
}

fn performance_table(chars: &TestCharacteristics, t: &TranslatedPerformance) -> String {
    let mut rows: Vec<(&str, String)> = vec![
        ("Sensitivity", fmt_opt_percent(Some(chars.sensitivity))),
        ("Specificity", fmt_opt_percent(Some(chars.specificity))),
        ("Prevalence", fmt_opt_percent(Some(t.prevalence))),
        ("PPV", fmt_opt_percent(t.ppv)),
        ("NPV", fmt_opt_percent(t.npv)),
        ("False alarms (of positive tests)", fmt_opt_percent(t.false_alarm_rate)),
        ("Missed cases (of negative tests)", fmt_opt_percent(t.missed_case_rate)),
        (
            "Tests per detected case",
            t.tests_per_detected_case
                .map(|v| format!("{:<6} ({v})", format!("{v:.0}")))
                .unwrap_or_else(|| "undefined".to_string()),
        ),
        ("Positive test rate", fmt_opt_percent(Some(t.positive_test_rate))),
        ("Accuracy", fmt_opt_percent(Some(t.accuracy))),
    ];
    if let Some(cost) = t.expected_cost {
        rows.push(("Expected cost per person", cost.to_string()));
    }
    if let Ok(b) = breakeven_prevalence(chars.sensitivity, chars.specificity) {
        rows.push(("Breakeven prevalence (PPV = 50%)", format!("{:<6} ({})", format!("{:.2}%", b.value() * 100.0), b.value())));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

pub fn metrics(args: &MetricsArgs) -> Result<()> {
    let chars = characteristics(&args.chars)?;
    let prev = Probability::named("prevalence", args.prev)?;
    let costs = costs(&args.costs)?;
    let t = translate(&chars, prev, costs.as_ref());
    let text = if args.json {
        let breakeven = breakeven_prevalence(chars.sensitivity, chars.specificity).ok();
        let mut s = serde_json::to_string_pretty(&json!({
            "characteristics": chars,
            "performance": t,
            "breakeven_prevalence": breakeven,
        }))
        .expect("serializable");
        s.push('\n');
        s
    } else {
        performance_table(&chars, &t)
    };
    emit(&text, None)
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    let chars = characteristics(&args.chars)?;
    let grid = grid(&args.grid)?;
    let marker = args
        .marker
        .map(|m| Probability::named("marker", m))
        .transpose()?;
    let curve = sweep(&chars, &grid, marker, costs(&args.costs)?)?;
    let text = match args.out {
        SweepFormat::Csv => curve_to_table(&curve).to_csv_string(),
        SweepFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "schema_version": assay_core::report::SCHEMA_VERSION,
                "curve": curve,
            }))
            .expect("serializable");
            s.push('\n');
            s
        }
        SweepFormat::Svg => render_prevalence_plot(&curve, &PlotOptions::prevalence_default())?,
    };
    emit(&text, args.out_file.as_deref())
}

struct RocAnalysis {
    curve: RocCurve,
    youden: TestCharacteristics,
    threshold: f64,
}

fn analyze(samples: &[ScoredSample], confidence: f64) -> Result<RocAnalysis> {
    let mut curve = empirical_roc(samples)?;
    // DeLong needs two samples per class; smaller sets get no interval
    curve.auc_ci = match auc_ci_delong(samples, confidence) {
        Ok(ci) => Some(ci),
        Err(assay_core::Error::TooFewSamples { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let best = youden_optimal_point(&curve);
    let youden = characteristics_at_point(&best, samples, confidence)?;
    Ok(RocAnalysis {
        curve,
        youden,
        threshold: best.threshold,
    })
}

fn roc_text(a: &RocAnalysis) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Samples: {} diseased, {} healthy\n",
        a.curve.n_diseased, a.curve.n_healthy
    ));
    out.push_str(&format!("AUC: {}\n", a.curve.auc.value()));
    match &a.curve.auc_ci {
        Some(ci) => out.push_str(&format!(
            "AUC {:.0}% CI (DeLong): {} to {}\n",
            ci.confidence_level * 100.0,
            ci.lower.value(),
            ci.upper.value()
        )),
        None => out.push_str("AUC CI: unavailable (needs at least 2 samples per class)\n"),
    }
    out.push_str(&format!("Youden cutoff: score >= {}\n", a.threshold));
    out.push_str(&format!(
        "  sensitivity {} ({})\n  specificity {} ({})\n",
        percent(a.youden.sensitivity),
        a.youden.sensitivity.value(),
        percent(a.youden.specificity),
        a.youden.specificity.value()
    ));
    out
}

pub fn roc(args: &RocArgs) -> Result<()> {
    let samples = read_samples(&args.input, &args.ingest)?;
    let analysis = analyze(&samples, args.confidence)?;
    let text = match args.out {
        RocFormat::Text => roc_text(&analysis),
        RocFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "roc": analysis.curve,
                "youden_threshold": analysis.threshold,
                "youden_characteristics": analysis.youden,
            }))
            .expect("serializable");
            s.push('\n');
            s
        }
        RocFormat::Svg => render_roc_plot(&analysis.curve, &PlotOptions::roc_default())?,
    };
    emit(&text, args.out_file.as_deref())?;

    if let (Some(dir), Some(prev)) = (&args.report, args.prev) {
        let prev = Probability::named("prevalence", prev)?;
        let report = build_report(
            &analysis.youden,
            prev,
            &PrevalenceGrid::default(),
            None,
            Some(analysis.curve),
        )?;
        write_report_files(dir, &report, false)?;
    }
    Ok(())
}

fn write_report_files(dir: &Path, report: &assay_core::Report, plots: bool) -> Result<String> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let md = report_to_markdown(report);
    write_file(dir, "report.json", &(report_to_json(report) + "\n"))?;
    write_file(dir, "report.md", &md)?;
    if plots {
        write_file(
            dir,
            "prevalence.svg",
            &render_prevalence_plot(&report.curve, &PlotOptions::prevalence_default())?,
        )?;
        if let Some(roc) = &report.roc {
            write_file(dir, "roc.svg", &render_roc_plot(roc, &PlotOptions::roc_default())?)?;
        }
    }
    Ok(md)
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let prev = Probability::named("prevalence", args.prev)?;
    let analysis = match &args.roc_input {
        Some(path) => Some(analyze(&read_samples(path, &args.ingest)?, args.chars.confidence)?),
        None => None,
    };
    let chars = match (&analysis, args.chars.given()) {
        (_, true) => characteristics(&args.chars)?,
        (Some(a), false) => a.youden.clone(),
        (None, false) => {
            return Err(CliError::Usage(
                "give --sens and --spec, --tp --fp --fn --tn, or --roc-input".to_string(),
            ))
        }
    };
    let report = build_report(
        &chars,
        prev,
        &grid(&args.grid)?,
        costs(&args.costs)?,
        analysis.map(|a| a.curve),
    )?;
    let md = write_report_files(&args.out_dir, &report, args.plots)?;
    emit(&md, None)
}
