//! Empirical ROC curves from scored, labeled samples.
//!
//! Conventions: a higher score is more disease-like, and a sample tests
//! positive when `score >= threshold`. Tied scores collapse into a single
//! (possibly diagonal) step of the curve and earn half credit in the
//! pairwise AUC, which makes the trapezoidal area under the empirical curve
//! equal to the Mann-Whitney estimate.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    characteristics_from_matrix, normal_critical_value, ConfidenceInterval, ConfusionMatrix,
    Probability, TestCharacteristics,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Diseased,
    Healthy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    score: f64,
    label: Label,
}

impl ScoredSample {
    pub fn new(score: f64, label: Label) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::NonFiniteScore(score));
        }
        Ok(Self { score, label })
    }

    pub fn diseased(score: f64) -> Result<Self> {
        Self::new(score, Label::Diseased)
    }

    pub fn healthy(score: f64) -> Result<Self> {
        Self::new(score, Label::Healthy)
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn is_diseased(&self) -> bool {
        self.label == Label::Diseased
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Cutoff producing this point; `+inf` for the (0, 0) anchor, which
    /// serializes to JSON `null`.
    pub threshold: f64,
    pub true_positive_rate: Probability,
    pub false_positive_rate: Probability,
}

impl RocPoint {
    pub fn youden_index(&self) -> f64 {
        self.true_positive_rate.value() - self.false_positive_rate.value()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: Probability,
    pub auc_ci: Option<ConfidenceInterval>,
    pub n_diseased: usize,
    pub n_healthy: usize,
}

fn class_counts(samples: &[ScoredSample]) -> (usize, usize) {
    let diseased = samples.iter().filter(|s| s.is_diseased()).count();
    (diseased, samples.len() - diseased)
}

fn require_both_classes(samples: &[ScoredSample]) -> Result<(usize, usize)> {
    let (diseased, healthy) = class_counts(samples);
    if diseased == 0 || healthy == 0 {
        return Err(Error::OneClassOnly { diseased, healthy });
    }
    Ok((diseased, healthy))
}

/// One point per distinct score (descending) plus the (0, 0) anchor.
///
/// The returned curve carries its trapezoidal AUC; `auc_ci` is left empty
/// (see [`auc_ci_delong`] and [`RocCurve::with_delong_ci`]).
pub fn empirical_roc(samples: &[ScoredSample]) -> Result<RocCurve> {
    let (n_diseased, n_healthy) = require_both_classes(samples)?;

    let mut sorted: Vec<&ScoredSample> = samples.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push(RocPoint {
        threshold: f64::INFINITY,
        true_positive_rate: Probability::ZERO,
        false_positive_rate: Probability::ZERO,
    });

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].score;
        while i < sorted.len() && sorted[i].score == threshold {
            if sorted[i].is_diseased() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            true_positive_rate: Probability::from_ratio(tp as f64 / n_diseased as f64),
            false_positive_rate: Probability::from_ratio(fp as f64 / n_healthy as f64),
        });
    }

    let mut curve = RocCurve {
        points,
        auc: Probability::ZERO,
        auc_ci: None,
        n_diseased,
        n_healthy,
    };
    curve.auc = auc_trapezoid(&curve);
    Ok(curve)
}

/// Trapezoidal area under the ordered curve points.
pub fn auc_trapezoid(curve: &RocCurve) -> Probability {
    let area: f64 = curve
        .points
        .windows(2)
        .map(|w| {
            let dx = w[1].false_positive_rate.value() - w[0].false_positive_rate.value();
            let mean_height =
                0.5 * (w[0].true_positive_rate.value() + w[1].true_positive_rate.value());
            dx * mean_height
        })
        .sum();
    Probability::from_ratio(area)
}

/// 1-based ranks, ties sharing the mean of the ranks they span.
fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1
        let rank = 0.5 * ((i + 1) + (j + 1)) as f64;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Per-sample placement values: for each diseased sample the fraction of
/// healthy samples it outscores (ties count half), and for each healthy
/// sample the fraction of diseased samples that outscore it.
struct Placements {
    diseased: Vec<f64>,
    healthy: Vec<f64>,
}

fn placements(samples: &[ScoredSample]) -> Placements {
    let (dis, hea): (Vec<&ScoredSample>, Vec<&ScoredSample>) =
        samples.iter().partition(|s| s.is_diseased());
    let dis_scores: Vec<f64> = dis.iter().map(|s| s.score).collect();
    let hea_scores: Vec<f64> = hea.iter().map(|s| s.score).collect();
    let all: Vec<f64> = dis_scores.iter().chain(&hea_scores).copied().collect();

    let combined = midranks(&all);
    let within_dis = midranks(&dis_scores);
    let within_hea = midranks(&hea_scores);
    let (nd, nh) = (dis_scores.len() as f64, hea_scores.len() as f64);

    // combined rank minus within-class rank = number of other-class samples
    // below, plus half of those tied
    let diseased = (0..dis_scores.len())
        .map(|i| (combined[i] - within_dis[i]) / nh)
        .collect();
    let offset = dis_scores.len();
    let healthy = (0..hea_scores.len())
        .map(|j| 1.0 - (combined[offset + j] - within_hea[j]) / nd)
        .collect();
    Placements { diseased, healthy }
}

/// Probability that a random diseased sample outscores a random healthy one,
/// ties counting one half. Computed from midranks in O(n log n).
pub fn auc_mann_whitney(samples: &[ScoredSample]) -> Result<Probability> {
    let (n_diseased, n_healthy) = require_both_classes(samples)?;
    let scores: Vec<f64> = samples.iter().map(|s| s.score).collect();
    let ranks = midranks(&scores);
    let rank_sum: f64 = samples
        .iter()
        .zip(&ranks)
        .filter(|(s, _)| s.is_diseased())
        .map(|(_, r)| r)
        .sum();
    let nd = n_diseased as f64;
    let u = rank_sum - nd * (nd + 1.0) / 2.0;
    Ok(Probability::from_ratio(u / (nd * n_healthy as f64)))
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// DeLong variance of the Mann-Whitney AUC.
pub fn delong_variance(samples: &[ScoredSample]) -> Result<f64> {
    let (diseased, healthy) = class_counts(samples);
    if diseased < 2 || healthy < 2 {
        return Err(Error::TooFewSamples { diseased, healthy });
    }
    let pl = placements(samples);
    Ok(sample_variance(&pl.diseased) / diseased as f64
        + sample_variance(&pl.healthy) / healthy as f64)
}

/// Normal-approximation interval around the Mann-Whitney AUC using the
/// DeLong variance, truncated to `[0, 1]`.
///
/// Truncation rather than a logit transform means the interval collapses to
/// a point for perfectly separated classes and is optimistic near AUC = 1.
pub fn auc_ci_delong(samples: &[ScoredSample], confidence_level: f64) -> Result<ConfidenceInterval> {
    let z = normal_critical_value(confidence_level)?;
    let variance = delong_variance(samples)?;
    let auc = auc_mann_whitney(samples)?.value();
    let half = z * variance.max(0.0).sqrt();
    Ok(ConfidenceInterval {
        lower: Probability::from_ratio((auc - half).clamp(0.0, auc)),
        upper: Probability::from_ratio((auc + half).clamp(auc, 1.0)),
        confidence_level,
    })
}

impl RocCurve {
    pub fn with_delong_ci(mut self, samples: &[ScoredSample], confidence_level: f64) -> Result<Self> {
        self.auc_ci = Some(auc_ci_delong(samples, confidence_level)?);
        Ok(self)
    }
}

/// Point maximizing `tpr - fpr`. Ties go to the lower threshold (the more
/// sensitive cutoff), then to the lower false positive rate.
pub fn youden_optimal_point(curve: &RocCurve) -> RocPoint {
    *curve
        .points
        .iter()
        .max_by(|a, b| {
            a.youden_index()
                .total_cmp(&b.youden_index())
                .then_with(|| b.threshold.total_cmp(&a.threshold))
                .then_with(|| {
                    b.false_positive_rate
                        .partial_cmp(&a.false_positive_rate)
                        .unwrap_or(Ordering::Equal)
                })
        })
        .expect("a valid ROC curve has at least two points")
}

/// Confusion matrix of the samples dichotomized at `threshold`.
pub fn confusion_at(samples: &[ScoredSample], threshold: f64) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    for s in samples {
        match (s.score >= threshold, s.label) {
            (true, Label::Diseased) => cm.true_positives += 1,
            (true, Label::Healthy) => cm.false_positives += 1,
            (false, Label::Diseased) => cm.false_negatives += 1,
            (false, Label::Healthy) => cm.true_negatives += 1,
        }
    }
    cm
}

/// Sensitivity and specificity (with Wilson intervals) at a chosen ROC point.
pub fn characteristics_at_point(
    point: &RocPoint,
    samples: &[ScoredSample],
    confidence_level: f64,
) -> Result<TestCharacteristics> {
    characteristics_from_matrix(&confusion_at(samples, point.threshold), confidence_level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(scores: &[f64], labels: &str) -> Vec<ScoredSample> {
        scores
            .iter()
            .zip(labels.chars())
            .map(|(&s, l)| match l {
                'D' => ScoredSample::diseased(s).unwrap(),
                _ => ScoredSample::healthy(s).unwrap(),
            })
            .collect()
    }

    fn coords(curve: &RocCurve) -> Vec<(f64, f64)> {
        curve
            .points
            .iter()
            .map(|p| (p.false_positive_rate.value(), p.true_positive_rate.value()))
            .collect()
    }

    #[test]
    fn non_finite_scores_rejected() {
        assert!(ScoredSample::diseased(f64::NAN).is_err());
        assert!(ScoredSample::healthy(f64::INFINITY).is_err());
    }

    #[test]
    fn perfect_separation() {
        let s = labeled(&[1.0, 2.0, 3.0, 4.0], "HHDD");
        let curve = empirical_roc(&s).unwrap();
        let pts = coords(&curve);
        for needle in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            assert!(pts.contains(&needle), "{pts:?}");
        }
        assert_eq!(auc_trapezoid(&curve).value(), 1.0);
        assert_eq!(auc_mann_whitney(&s).unwrap().value(), 1.0);

        let best = youden_optimal_point(&curve);
        assert_eq!(
            (best.false_positive_rate.value(), best.true_positive_rate.value()),
            (0.0, 1.0)
        );
        let chars = characteristics_at_point(&best, &s, 0.95).unwrap();
        assert_eq!(chars.sensitivity, Probability::ONE);
        assert_eq!(chars.specificity, Probability::ONE);
    }

    #[test]
    fn all_tied_scores_give_the_diagonal() {
        let s = labeled(&[0.5; 6], "DDHHHD");
        let curve = empirical_roc(&s).unwrap();
        assert_eq!(coords(&curve), vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(auc_trapezoid(&curve).value(), 0.5);
        assert_eq!(auc_mann_whitney(&s).unwrap().value(), 0.5);

        // J = 0 everywhere; the lower (finite) threshold wins
        let best = youden_optimal_point(&curve);
        assert_eq!(best.threshold, 0.5);
        let chars = characteristics_at_point(&best, &s, 0.95).unwrap();
        assert_eq!(chars.sensitivity.value() + chars.specificity.complement().value(), 2.0);
    }

    #[test]
    fn one_class_only() {
        let s = labeled(&[1.0, 2.0], "DD");
        assert!(matches!(empirical_roc(&s), Err(Error::OneClassOnly { .. })));
        assert!(matches!(auc_mann_whitney(&s), Err(Error::OneClassOnly { .. })));
        assert!(matches!(empirical_roc(&[]), Err(Error::OneClassOnly { .. })));
    }

    #[test]
    fn mann_whitney_small_cases() {
        assert_eq!(auc_mann_whitney(&labeled(&[2.0, 3.0, 0.0, 1.0], "DDHH")).unwrap().value(), 1.0);
        assert_eq!(auc_mann_whitney(&labeled(&[1.0, 1.0], "DH")).unwrap().value(), 0.5);
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn delong_examples() {
        let s = labeled(&[3.0, 4.0, 5.0, 0.0, 1.0, 2.0], "DDDHHH");
        let ci = auc_ci_delong(&s, 0.95).unwrap();
        assert_eq!((ci.lower.value(), ci.upper.value()), (1.0, 1.0));
        assert_eq!(delong_variance(&s).unwrap(), 0.0);

        let s = labeled(&[0.9, 0.4, 0.7, 0.3, 0.5, 0.8, 0.1, 0.6], "DDDDHHHH");
        let auc = auc_mann_whitney(&s).unwrap();
        let ci = auc_ci_delong(&s, 0.95).unwrap();
        assert!(ci.contains(auc));
        assert!(ci.width() > 0.0);

        assert!(matches!(
            auc_ci_delong(&labeled(&[1.0, 2.0, 3.0], "DHH"), 0.95),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn delong_variance_matches_pairwise_definition() {
        // placements computed directly from pair comparisons
        let s = labeled(&[0.9, 0.4, 0.7, 0.4, 0.5, 0.8, 0.1, 0.4, 0.7], "DDDDHHHHH");
        let d: Vec<f64> = s.iter().filter(|x| x.is_diseased()).map(|x| x.score).collect();
        let h: Vec<f64> = s.iter().filter(|x| !x.is_diseased()).map(|x| x.score).collect();
        let psi = |x: f64, y: f64| if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 };
        let v10: Vec<f64> = d.iter().map(|&x| h.iter().map(|&y| psi(x, y)).sum::<f64>() / h.len() as f64).collect();
        let v01: Vec<f64> = h.iter().map(|&y| d.iter().map(|&x| psi(x, y)).sum::<f64>() / d.len() as f64).collect();
        let expected = sample_variance(&v10) / d.len() as f64 + sample_variance(&v01) / h.len() as f64;
        assert!((delong_variance(&s).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn engineered_youden_point_reproduces_97_92_characteristics() {
        // 100 diseased, 100 healthy: 8 healthy outscore everyone, 97 diseased
        // sit above the remaining 92 healthy, 3 diseased sit at the bottom
        let mut s = Vec::new();
        for i in 0..8 {
            s.push(ScoredSample::healthy(100.0 + i as f64).unwrap());
        }
        for i in 0..97 {
            s.push(ScoredSample::diseased(50.0 + i as f64 * 0.1).unwrap());
        }
        for i in 0..92 {
            s.push(ScoredSample::healthy(10.0 + i as f64 * 0.1).unwrap());
        }
        for i in 0..3 {
            s.push(ScoredSample::diseased(i as f64).unwrap());
        }
        let curve = empirical_roc(&s).unwrap();
        let best = youden_optimal_point(&curve);
        let chars = characteristics_at_point(&best, &s, 0.95).unwrap();
        assert!((chars.sensitivity.value() - 0.97).abs() < 1e-12);
        assert!((chars.specificity.value() - 0.92).abs() < 1e-12);
        assert_eq!(best.threshold, 50.0);
    }
}
