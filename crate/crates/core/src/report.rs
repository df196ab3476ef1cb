//! The assay report: test characteristics, the headline translation at the
//! expected prevalence, the full prevalence sweep and optionally a ROC
//! curve, rendered as JSON (full precision) or Markdown (rounded for
//! reading).

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{
    breakeven_prevalence, translate, ConfidenceInterval, Probability, TestCharacteristics,
    TranslatedPerformance,
};
use crate::roc::RocCurve;
use crate::sweep::{sweep, CostWeights, PrevalenceCurve, PrevalenceGrid};

pub const SCHEMA_VERSION: u32 = 1;

/// Summary values a reader wants before looking at any plot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NarrativeFields {
    /// Prevalence at which half of all positive tests are false alarms.
    pub breakeven_prevalence: Option<Probability>,
    pub tests_per_detected_case_at_marker: Option<f64>,
    /// More than half of the positive tests at the marker are false alarms.
    pub most_positives_are_false_alarms: bool,
    /// Both sensitivity and specificity are at least 90%.
    pub meets_ninety_ninety: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub characteristics: TestCharacteristics,
    pub headline: TranslatedPerformance,
    pub curve: PrevalenceCurve,
    pub roc: Option<RocCurve>,
    pub narrative: NarrativeFields,
}

pub fn build_report(
    chars: &TestCharacteristics,
    marker: Probability,
    grid: &PrevalenceGrid,
    costs: Option<CostWeights>,
    roc: Option<RocCurve>,
) -> Result<Report> {
    let curve = sweep(chars, grid, Some(marker), costs)?;
    let headline = translate(chars, marker, costs.as_ref());
    let breakeven = match breakeven_prevalence(chars.sensitivity, chars.specificity) {
        Ok(b) => Some(b),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let narrative = NarrativeFields {
        breakeven_prevalence: breakeven,
        tests_per_detected_case_at_marker: headline.tests_per_detected_case,
        most_positives_are_false_alarms: headline
            .false_alarm_rate
            .is_some_and(|far| far.value() > 0.5),
        meets_ninety_ninety: chars.sensitivity.value() >= 0.9 && chars.specificity.value() >= 0.9,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        characteristics: chars.clone(),
        headline,
        curve,
        roc,
        narrative,
    })
}

pub fn report_to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

/// Whole percent, e.g. 0.5637 -> "56%".
pub fn percent(p: Probability) -> String {
    format!("{:.0}%", p.value() * 100.0)
}

fn percent_or_undefined(p: Option<Probability>) -> String {
    p.map(percent).unwrap_or_else(|| "undefined".to_string())
}

fn ci_text(ci: &Option<ConfidenceInterval>) -> String {
    match ci {
        Some(ci) => format!(
            " ({:.0}% CI: {:.1}%, {:.1}%)",
            ci.confidence_level * 100.0,
            ci.lower.value() * 100.0,
            ci.upper.value() * 100.0
        ),
        None => String::new(),
    }
}

pub fn report_to_markdown(report: &Report) -> String {
    let chars = &report.characteristics;
    let h = &report.headline;
    let prev = percent(h.prevalence);
    let mut md = String::new();

    let _ = writeln!(md, "# Assay performance report\n");
    let _ = writeln!(md, "## Test characteristics\n");
    let _ = writeln!(
        md,
        "- Sensitivity: {}{}",
        percent(chars.sensitivity),
        ci_text(&chars.sensitivity_ci)
    );
    let _ = writeln!(
        md,
        "- Specificity: {}{}",
        percent(chars.specificity),
        ci_text(&chars.specificity_ci)
    );
    if let Some(cm) = &chars.source_counts {
        let _ = writeln!(
            md,
            "- Validation counts: TP {}, FP {}, FN {}, TN {}",
            cm.true_positives, cm.false_positives, cm.false_negatives, cm.true_negatives
        );
    }
    if let Some(roc) = &report.roc {
        let _ = write!(md, "- ROC AUC: {:.2}", roc.auc.value());
        if let Some(ci) = &roc.auc_ci {
            let _ = write!(
                md,
                " ({:.0}% CI: {:.2}, {:.2})",
                ci.confidence_level * 100.0,
                ci.lower.value(),
                ci.upper.value()
            );
        }
        let _ = writeln!(md, " from {} diseased and {} healthy samples", roc.n_diseased, roc.n_healthy);
    }

    let _ = writeln!(md, "\n## At a prevalence of {prev}\n");
    let _ = writeln!(md, "| Quantity | Value |");
    let _ = writeln!(md, "|---|---|");
    let _ = writeln!(md, "| Positive predictive value (PPV) | {} |", percent_or_undefined(h.ppv));
    let _ = writeln!(md, "| Negative predictive value (NPV) | {} |", percent_or_undefined(h.npv));
    let _ = writeln!(
        md,
        "| False alarms (share of positive tests) | {} |",
        percent_or_undefined(h.false_alarm_rate)
    );
    let _ = writeln!(
        md,
        "| Missed cases (share of negative tests) | {} |",
        percent_or_undefined(h.missed_case_rate)
    );
    let _ = writeln!(
        md,
        "| Tests per detected case | {} |",
        h.tests_per_detected_case
            .map(|t| format!("{t:.0}"))
            .unwrap_or_else(|| "undefined".to_string())
    );
    let _ = writeln!(md, "| Share of patients testing positive | {} |", percent(h.positive_test_rate));
    let _ = writeln!(md, "| Accuracy | {} |", percent(h.accuracy));
    if let (Some(cost), Some(w)) = (h.expected_cost, &report.curve.cost_weights) {
        let _ = writeln!(
            md,
            "| Expected cost per person tested (false alarm {}, missed case {}) | {:.3} |",
            w.cost_per_false_alarm, w.cost_per_missed_case, cost
        );
    }

    let _ = writeln!(md, "\n## Summary\n");
    match h.false_alarm_rate {
        Some(far) => {
            let _ = write!(
                md,
                "At a prevalence of {prev}, {} of positive results are expected to be false alarms",
                percent(far)
            );
        }
        None => {
            let _ = write!(md, "At a prevalence of {prev}, no test is expected to be positive");
        }
    }
    match h.tests_per_detected_case {
        Some(t) => {
            let _ = writeln!(md, "; on average {t:.0} tests are run per true case found.");
        }
        None => {
            let _ = writeln!(md, ", and no case can be detected.");
        }
    }
    if let Some(b) = report.narrative.breakeven_prevalence {
        let _ = writeln!(
            md,
            "\nBelow a prevalence of {:.1}%, most positive tests are false alarms.",
            b.value() * 100.0
        );
    }
    if report.narrative.meets_ninety_ninety && report.narrative.most_positives_are_false_alarms {
        let _ = writeln!(
            md,
            "\nSensitivity and specificity both reach 90%, yet most positive results at this prevalence are false alarms."
        );
    }
    let grid_start = report.curve.points.first().map(|p| p.prevalence);
    let grid_end = report.curve.points.last().map(|p| p.prevalence);
    if let (Some(a), Some(b)) = (grid_start, grid_end) {
        let _ = writeln!(
            md,
            "\nThe prevalence sweep covers {} to {} in {} points.",
            percent(a),
            percent(b),
            report.curve.points.len()
        );
    }
    md
}
