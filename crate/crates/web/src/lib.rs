//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a JSON string so the page needs no
//! generated TypeScript types. The `*_json` functions hold the logic and are
//! plain Rust so they can be tested natively.

use assay_core::roc::{auc_ci_delong, characteristics_at_point, empirical_roc, youden_optimal_point};
use assay_core::{
    build_report, parse_samples_csv, render_prevalence_plot, render_roc_plot, CostWeights,
    CsvIngestConfig, PlotOptions, PrevalenceGrid, Probability, TestCharacteristics,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn prob(what: &'static str, v: f64) -> Result<Probability, String> {
    Probability::named(what, v).map_err(|e| e.to_string())
}

/// Headline numbers plus the false-alarm / missed-case plot for the given
/// characteristics.
pub fn prevalence_view_json(
    sens: f64,
    spec: f64,
    marker: f64,
    cost_fa: Option<f64>,
    cost_md: Option<f64>,
) -> Result<String, String> {
    let chars = TestCharacteristics::new(prob("sensitivity", sens)?, prob("specificity", spec)?);
    let costs = match (cost_fa, cost_md) {
        (Some(fa), Some(md)) => Some(CostWeights::new(fa, md).map_err(|e| e.to_string())?),
        _ => None,
    };
    let report = build_report(
        &chars,
        prob("prevalence", marker)?,
        &PrevalenceGrid::default(),
        costs,
        None,
    )
    .map_err(|e| e.to_string())?;
    let opts = PlotOptions {
        width_px: 720,
        height_px: 440,
        ..PlotOptions::prevalence_default()
    };
    let svg = render_prevalence_plot(&report.curve, &opts).map_err(|e| e.to_string())?;
    Ok(json!({
        "svg": svg,
        "headline": report.headline,
        "narrative": report.narrative,
    })
    .to_string())
}

/// ROC curve, AUC with DeLong interval and the Youden cutoff for pasted CSV.
pub fn roc_view_json(csv_text: &str, positive_label: &str, invert_scores: bool) -> Result<String, String> {
    let config = CsvIngestConfig {
        positive_label: positive_label.trim().to_string(),
        invert_scores,
        ..CsvIngestConfig::default()
    };
    let samples = parse_samples_csv(csv_text.as_bytes(), &config).map_err(|e| e.to_string())?;
    let mut curve = empirical_roc(&samples).map_err(|e| e.to_string())?;
    curve.auc_ci = auc_ci_delong(&samples, 0.95).ok();
    let best = youden_optimal_point(&curve);
    let chars = characteristics_at_point(&best, &samples, 0.95).map_err(|e| e.to_string())?;
    let svg = render_roc_plot(&curve, &PlotOptions::roc_default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "svg": svg,
        "auc": curve.auc,
        "auc_ci": curve.auc_ci,
        "n_diseased": curve.n_diseased,
        "n_healthy": curve.n_healthy,
        "youden_threshold": best.threshold,
        "youden_sensitivity": chars.sensitivity,
        "youden_specificity": chars.specificity,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn prevalence_view(
    sens: f64,
    spec: f64,
    marker: f64,
    cost_fa: Option<f64>,
    cost_md: Option<f64>,
) -> Result<String, JsValue> {
    prevalence_view_json(sens, spec, marker, cost_fa, cost_md).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn roc_view(csv_text: &str, positive_label: &str, invert_scores: bool) -> Result<String, JsValue> {
    roc_view_json(csv_text, positive_label, invert_scores).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn worked_example_view() {
        let v: Value = serde_json::from_str(&prevalence_view_json(0.97, 0.92, 0.06, None, None).unwrap()).unwrap();
        let far = v["headline"]["false_alarm_rate"].as_f64().unwrap();
        assert!((far - 0.5637).abs() < 1e-4);
        assert!(v["svg"].as_str().unwrap().contains("prevalence-marker"));
        assert!(v["headline"]["expected_cost"].is_null());
    }

    #[test]
    fn costs_flow_through() {
        let v: Value =
            serde_json::from_str(&prevalence_view_json(0.97, 0.92, 0.06, Some(10.0), Some(1000.0)).unwrap()).unwrap();
        assert!((v["headline"]["expected_cost"].as_f64().unwrap() - 2.552).abs() < 1e-9);
    }

    #[test]
    fn bad_inputs_are_messages() {
        assert!(prevalence_view_json(1.5, 0.9, 0.1, None, None)
            .unwrap_err()
            .contains("sensitivity"));
        assert!(roc_view_json("score,label\n1,1\n", "1", false)
            .unwrap_err()
            .contains("healthy"));
    }

    #[test]
    fn roc_view_from_text() {
        let csv = "score,label\n0.9,1\n0.8,1\n0.7,0\n0.3,1\n0.2,0\n0.1,0\n";
        let v: Value = serde_json::from_str(&roc_view_json(csv, "1", false).unwrap()).unwrap();
        let auc = v["auc"].as_f64().unwrap();
        assert!((auc - 8.0 / 9.0).abs() < 1e-12);
        assert_eq!(v["n_diseased"], 3);
        assert!(v["svg"].as_str().unwrap().starts_with("<?xml"));
    }
}
