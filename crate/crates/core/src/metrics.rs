//! Closed-form accuracy metrics.
//!
//! Confusion-matrix summaries, the Bayes translation from
//! (sensitivity, specificity, prevalence) to predictive values, and Wilson
//! score intervals for binomial proportions. Everything here is a pure
//! function of its inputs.
//!
//! Ratios whose denominator vanishes (for example PPV when no test is ever
//! positive) are errors in the single-value functions and `None` in
//! [`TranslatedPerformance`]; a NaN never escapes this module.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::sweep::{expected_cost_per_person, CostWeights};

/// Tolerance used for closed-form identities (complementarity, breakeven,
/// count ratios).
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        Self::named("probability", value)
    }

    /// Like [`Probability::new`], but the error names the quantity.
    pub fn named(what: &'static str, value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::InvalidProbability { what, value })
        }
    }

    /// For ratios that are in range by construction; clamps away rounding.
    pub(crate) fn from_ratio(value: f64) -> Self {
        debug_assert!(value.is_finite(), "non-finite ratio {value}");
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Outcome counts of a validation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(
        true_positives: u64,
        false_positives: u64,
        false_negatives: u64,
        true_negatives: u64,
    ) -> Self {
        Self {
            true_positives,
            false_positives,
            false_negatives,
            true_negatives,
        }
    }

    pub fn diseased(&self) -> u64 {
        self.true_positives + self.false_negatives
    }

    pub fn healthy(&self) -> u64 {
        self.false_positives + self.true_negatives
    }

    pub fn total(&self) -> u64 {
        self.diseased() + self.healthy()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: Probability,
    pub upper: Probability,
    pub confidence_level: f64,
}

impl ConfidenceInterval {
    pub fn new(lower: Probability, upper: Probability, confidence_level: f64) -> Result<Self> {
        check_confidence_level(confidence_level)?;
        if lower > upper {
            return Err(Error::Degenerate("interval lower bound exceeds upper bound"));
        }
        Ok(Self {
            lower,
            upper,
            confidence_level,
        })
    }

    pub fn contains(&self, p: Probability) -> bool {
        self.lower <= p && p <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }
}

/// The prevalence-independent summary of an assay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCharacteristics {
    pub sensitivity: Probability,
    pub specificity: Probability,
    pub sensitivity_ci: Option<ConfidenceInterval>,
    pub specificity_ci: Option<ConfidenceInterval>,
    pub source_counts: Option<ConfusionMatrix>,
}

impl TestCharacteristics {
    pub fn new(sensitivity: Probability, specificity: Probability) -> Self {
        Self {
            sensitivity,
            specificity,
            sensitivity_ci: None,
            specificity_ci: None,
            source_counts: None,
        }
    }

    /// Convenience constructor from raw fractions.
    pub fn from_values(sensitivity: f64, specificity: f64) -> Result<Self> {
        Ok(Self::new(
            Probability::named("sensitivity", sensitivity)?,
            Probability::named("specificity", specificity)?,
        ))
    }
}

/// Everything that depends on prevalence, evaluated at one prevalence.
///
/// `None` marks a quantity whose denominator vanishes at this prevalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslatedPerformance {
    pub prevalence: Probability,
    pub ppv: Option<Probability>,
    pub npv: Option<Probability>,
    /// Share of positive tests that are false (1 - PPV).
    pub false_alarm_rate: Option<Probability>,
    /// Share of negative tests that are false (1 - NPV).
    pub missed_case_rate: Option<Probability>,
    pub tests_per_detected_case: Option<f64>,
    pub positive_test_rate: Probability,
    pub accuracy: Probability,
    pub expected_cost: Option<f64>,
}

pub fn sensitivity_of(cm: &ConfusionMatrix) -> Result<Probability> {
    let diseased = cm.diseased();
    if diseased == 0 {
        return Err(Error::NoDiseasedSamples);
    }
    Ok(Probability::from_ratio(
        cm.true_positives as f64 / diseased as f64,
    ))
}

pub fn specificity_of(cm: &ConfusionMatrix) -> Result<Probability> {
    let healthy = cm.healthy();
    if healthy == 0 {
        return Err(Error::NoHealthySamples);
    }
    Ok(Probability::from_ratio(
        cm.true_negatives as f64 / healthy as f64,
    ))
}

/// Probability that a positive test is a true case.
pub fn ppv_at(sens: Probability, spec: Probability, prev: Probability) -> Result<Probability> {
    let true_pos = sens.0 * prev.0;
    let false_pos = (1.0 - spec.0) * (1.0 - prev.0);
    let positives = true_pos + false_pos;
    if positives <= 0.0 {
        return Err(Error::NoPositiveTests);
    }
    Ok(Probability::from_ratio(true_pos / positives))
}

/// Probability that a negative test is truly disease-free.
pub fn npv_at(sens: Probability, spec: Probability, prev: Probability) -> Result<Probability> {
    let true_neg = spec.0 * (1.0 - prev.0);
    let false_neg = (1.0 - sens.0) * prev.0;
    let negatives = true_neg + false_neg;
    if negatives <= 0.0 {
        return Err(Error::NoNegativeTests);
    }
    Ok(Probability::from_ratio(true_neg / negatives))
}

pub fn false_alarm_rate_at(
    sens: Probability,
    spec: Probability,
    prev: Probability,
) -> Result<Probability> {
    ppv_at(sens, spec, prev).map(Probability::complement)
}

pub fn missed_case_rate_at(
    sens: Probability,
    spec: Probability,
    prev: Probability,
) -> Result<Probability> {
    npv_at(sens, spec, prev).map(Probability::complement)
}

/// Expected number of patients tested per true case found, `1 / (sens * prev)`.
///
/// Returned at full precision; round only for display.
pub fn tests_per_detected_case(sens: Probability, prev: Probability) -> Result<f64> {
    let yield_per_test = sens.0 * prev.0;
    if yield_per_test <= 0.0 {
        return Err(Error::NoDetectableCases);
    }
    Ok(1.0 / yield_per_test)
}

/// Prevalence at which PPV equals one half. Below it, most positive tests
/// are false alarms.
pub fn breakeven_prevalence(sens: Probability, spec: Probability) -> Result<Probability> {
    let fpr = 1.0 - spec.0;
    let denom = fpr + sens.0;
    if denom <= 0.0 {
        return Err(Error::Degenerate(
            "sensitivity 0 and specificity 1: the test is never positive",
        ));
    }
    Ok(Probability::from_ratio(fpr / denom))
}

fn check_confidence_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfidenceLevel(level))
    }
}

/// Two-sided standard normal critical value for `level`, e.g. 1.959964 at 0.95.
pub fn normal_critical_value(level: f64) -> Result<f64> {
    check_confidence_level(level)?;
    let standard = Normal::standard();
    Ok(standard.inverse_cdf(1.0 - (1.0 - level) / 2.0))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence_level: f64) -> Result<ConfidenceInterval> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    if successes > trials {
        return Err(Error::SuccessesExceedTrials { successes, trials });
    }
    let z = normal_critical_value(confidence_level)?;
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;

    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();

    // the bounds touch 0 and 1 exactly at the extremes; avoid rounding residue
    let lower = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p_hat)
    };
    let upper = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p_hat, 1.0)
    };

    Ok(ConfidenceInterval {
        lower: Probability::from_ratio(lower),
        upper: Probability::from_ratio(upper),
        confidence_level,
    })
}

pub fn characteristics_from_matrix(
    cm: &ConfusionMatrix,
    confidence_level: f64,
) -> Result<TestCharacteristics> {
    let sensitivity = sensitivity_of(cm)?;
    let specificity = specificity_of(cm)?;
    Ok(TestCharacteristics {
        sensitivity,
        specificity,
        sensitivity_ci: Some(wilson_interval(
            cm.true_positives,
            cm.diseased(),
            confidence_level,
        )?),
        specificity_ci: Some(wilson_interval(
            cm.true_negatives,
            cm.healthy(),
            confidence_level,
        )?),
        source_counts: Some(*cm),
    })
}

/// Evaluates every prevalence-dependent quantity at `prev`.
///
/// Never fails: quantities with a vanishing denominator come back as `None`.
pub fn translate(
    chars: &TestCharacteristics,
    prev: Probability,
    costs: Option<&CostWeights>,
) -> TranslatedPerformance {
    let sens = chars.sensitivity;
    let spec = chars.specificity;
    let ppv = ppv_at(sens, spec, prev).ok();
    let npv = npv_at(sens, spec, prev).ok();

    let positive_test_rate = sens.0 * prev.0 + (1.0 - spec.0) * (1.0 - prev.0);
    let accuracy = sens.0 * prev.0 + spec.0 * (1.0 - prev.0);

    TranslatedPerformance {
        prevalence: prev,
        ppv,
        npv,
        false_alarm_rate: ppv.map(Probability::complement),
        missed_case_rate: npv.map(Probability::complement),
        tests_per_detected_case: tests_per_detected_case(sens, prev).ok(),
        positive_test_rate: Probability::from_ratio(positive_test_rate),
        accuracy: Probability::from_ratio(accuracy),
        expected_cost: costs.map(|c| expected_cost_per_person(chars, prev, c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn probability_rejects_out_of_range() {
        assert!(Probability::new(-0.01).is_err());
        assert!(Probability::new(1.2).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::new(1.0).unwrap(), Probability::ONE);
        let err = Probability::named("sensitivity", 1.2).unwrap_err();
        assert!(err.to_string().contains("[0, 1]"));
    }

    #[test]
    fn probability_deserialization_validates() {
        assert!(serde_json::from_str::<Probability>("0.3").is_ok());
        assert!(serde_json::from_str::<Probability>("1.3").is_err());
    }

    #[test]
    fn sensitivity_examples() {
        let cm = ConfusionMatrix::new(97, 8, 3, 92);
        assert!(close(sensitivity_of(&cm).unwrap().value(), 0.97, 1e-12));
        assert_eq!(
            sensitivity_of(&ConfusionMatrix::new(0, 5, 0, 5)),
            Err(Error::NoDiseasedSamples)
        );
        assert_eq!(
            sensitivity_of(&ConfusionMatrix::new(10, 0, 0, 10)).unwrap(),
            Probability::ONE
        );
    }

    #[test]
    fn specificity_examples() {
        let cm = ConfusionMatrix::new(97, 8, 3, 92);
        assert!(close(specificity_of(&cm).unwrap().value(), 0.92, 1e-12));
        assert_eq!(
            specificity_of(&ConfusionMatrix::new(5, 0, 5, 0)),
            Err(Error::NoHealthySamples)
        );
        assert_eq!(
            specificity_of(&ConfusionMatrix::new(1, 1, 1, 1)).unwrap().value(),
            0.5
        );
    }

    #[test]
    fn ppv_examples() {
        assert!(close(ppv_at(p(0.9), p(0.9), p(0.1)).unwrap().value(), 0.5, 1e-12));
        assert!(close(
            ppv_at(p(0.97), p(0.92), p(0.06)).unwrap().value(),
            0.4363,
            1e-4
        ));
        assert_eq!(ppv_at(p(0.3), p(1.0), p(0.2)).unwrap(), Probability::ONE);
        assert_eq!(ppv_at(p(0.3), p(1.0), p(0.0)), Err(Error::NoPositiveTests));
        assert_eq!(ppv_at(p(0.0), p(1.0), p(1.0)), Err(Error::NoPositiveTests));
    }

    #[test]
    fn npv_examples() {
        assert_eq!(npv_at(p(0.97), p(0.92), p(1.0)).unwrap(), Probability::ZERO);
        assert!(close(
            npv_at(p(0.97), p(0.92), p(0.06)).unwrap().value(),
            0.99792,
            1e-4
        ));
        assert_eq!(npv_at(p(1.0), p(0.4), p(0.7)).unwrap(), Probability::ONE);
        assert_eq!(npv_at(p(1.0), p(0.4), p(1.0)), Err(Error::NoNegativeTests));
    }

    #[test]
    fn false_alarm_and_missed_case_examples() {
        let far = false_alarm_rate_at(p(0.97), p(0.92), p(0.06)).unwrap();
        assert_eq!(format!("{:.2}", far.value()), "0.56");
        assert_eq!(
            false_alarm_rate_at(p(0.4), p(0.7), p(0.0)).unwrap(),
            Probability::ONE
        );
        assert!(close(
            false_alarm_rate_at(p(0.9), p(0.9), p(0.1)).unwrap().value(),
            0.5,
            1e-12
        ));

        assert_eq!(
            missed_case_rate_at(p(0.97), p(0.92), p(1.0)).unwrap(),
            Probability::ONE
        );
        assert_eq!(
            missed_case_rate_at(p(1.0), p(0.3), p(0.5)).unwrap(),
            Probability::ZERO
        );
        assert!(close(
            missed_case_rate_at(p(0.97), p(0.92), p(0.06)).unwrap().value(),
            0.00208,
            1e-4
        ));
    }

    #[test]
    fn tests_per_case_examples() {
        let t = tests_per_detected_case(p(0.97), p(0.06)).unwrap();
        assert!(close(t, 17.18, 0.01));
        assert_eq!(format!("{t:.0}"), "17");
        assert_eq!(tests_per_detected_case(p(1.0), p(1.0)).unwrap(), 1.0);
        assert_eq!(
            tests_per_detected_case(p(0.5), p(0.0)),
            Err(Error::NoDetectableCases)
        );
    }

    /// Bisection on ppv(p) - 1/2, which is increasing in p.
    fn bisect_breakeven(sens: f64, spec: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let tp = sens * mid;
            let fp = (1.0 - spec) * (1.0 - mid);
            if tp / (tp + fp) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn breakeven_examples() {
        let b = breakeven_prevalence(p(0.9), p(0.9)).unwrap().value();
        assert!(close(b, 0.10, 1e-12));
        assert!(close(b, bisect_breakeven(0.9, 0.9), 1e-12));

        let b = breakeven_prevalence(p(0.97), p(0.92)).unwrap().value();
        assert!(close(b, 0.0762, 1e-4));
        assert!(close(b, bisect_breakeven(0.97, 0.92), 1e-12));

        assert_eq!(
            breakeven_prevalence(p(1.0), p(1.0)).unwrap(),
            Probability::ZERO
        );
        assert!(matches!(
            breakeven_prevalence(p(0.0), p(1.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn critical_value() {
        assert!(close(normal_critical_value(0.95).unwrap(), 1.959964, 1e-6));
        assert!(normal_critical_value(1.0).is_err());
        assert!(normal_critical_value(0.0).is_err());
    }

    #[test]
    fn wilson_examples() {
        let ci = wilson_interval(0, 10, 0.95).unwrap();
        assert_eq!(ci.lower.value(), 0.0);

        // by hand with z = 1.959964: center 0.7167, half-width 0.2266
        let ci = wilson_interval(8, 10, 0.95).unwrap();
        assert!(close(ci.lower.value(), 0.490, 0.002), "{ci:?}");
        assert!(close(ci.upper.value(), 0.943, 0.002), "{ci:?}");

        let ci = wilson_interval(10, 10, 0.95).unwrap();
        assert_eq!(ci.upper.value(), 1.0);

        assert_eq!(wilson_interval(0, 0, 0.95), Err(Error::NoTrials));
        assert!(wilson_interval(11, 10, 0.95).is_err());
        assert!(wilson_interval(3, 10, 1.5).is_err());
    }

    #[test]
    fn wilson_width_shrinks_with_trials() {
        for &(k, n) in &[(1u64, 2u64), (1, 4), (3, 4), (1, 10), (9, 10)] {
            let mut prev_width = f64::INFINITY;
            for scale in 1..=8u64 {
                let ci = wilson_interval(k * scale, n * scale, 0.95).unwrap();
                assert!(ci.width() < prev_width, "k={k} n={n} scale={scale}");
                prev_width = ci.width();
            }
        }
    }

    #[test]
    fn characteristics_examples() {
        let chars = characteristics_from_matrix(&ConfusionMatrix::new(97, 8, 3, 92), 0.95).unwrap();
        assert!(close(chars.sensitivity.value(), 0.97, 1e-12));
        assert!(close(chars.specificity.value(), 0.92, 1e-12));
        assert!(chars.sensitivity_ci.unwrap().contains(chars.sensitivity));
        assert!(chars.specificity_ci.unwrap().contains(chars.specificity));
        assert_eq!(chars.source_counts, Some(ConfusionMatrix::new(97, 8, 3, 92)));

        let chars = characteristics_from_matrix(&ConfusionMatrix::new(9, 1, 1, 9), 0.95).unwrap();
        assert!(close(chars.sensitivity.value(), 0.9, 1e-12));
        assert!(close(chars.specificity.value(), 0.9, 1e-12));

        assert!(characteristics_from_matrix(&ConfusionMatrix::new(0, 0, 0, 0), 0.95).is_err());
    }

    #[test]
    fn translate_examples() {
        let example = TestCharacteristics::from_values(0.97, 0.92).unwrap();
        let t = translate(&example, p(0.06), None);
        assert_eq!(format!("{:.2}", t.false_alarm_rate.unwrap().value()), "0.56");
        assert!(close(t.tests_per_detected_case.unwrap(), 17.18, 0.01));
        assert_eq!(t.expected_cost, None);

        let rule = TestCharacteristics::from_values(0.9, 0.9).unwrap();
        let t = translate(&rule, p(0.1), None);
        assert!(close(t.false_alarm_rate.unwrap().value(), 0.5, 1e-12));
        assert!(close(t.accuracy.value(), 0.9, 1e-12));

        let perfect_spec = TestCharacteristics::from_values(0.8, 1.0).unwrap();
        let t = translate(&perfect_spec, Probability::ZERO, None);
        assert_eq!(t.ppv, None);
        assert_eq!(t.false_alarm_rate, None);
        assert_eq!(t.npv, Some(Probability::ONE));
        assert_eq!(t.tests_per_detected_case, None);
    }
}
