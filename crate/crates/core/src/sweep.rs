//! Prevalence sweeps, misclassification-cost curves and their tabular form.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{translate, Probability, TestCharacteristics, TranslatedPerformance};

pub const DEFAULT_GRID_STEPS: usize = 101;

/// Strictly increasing prevalence points, both endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceGrid {
    points: Vec<Probability>,
}

impl PrevalenceGrid {
    /// `steps` evenly spaced points from `start` to `end` inclusive.
    pub fn linear(start: Probability, end: Probability, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "a grid needs at least 2 points, got {steps}"
            )));
        }
        if start >= end {
            return Err(Error::InvalidGrid(format!(
                "start ({start}) must be below end ({end})"
            )));
        }
        let (a, b) = (start.value(), end.value());
        let last = steps - 1;
        let points = (0..steps)
            .map(|i| {
                if i == last {
                    end
                } else {
                    let t = i as f64 / last as f64;
                    Probability::from_ratio(a + (b - a) * t)
                }
            })
            .collect::<Vec<_>>();
        Self::explicit(points)
    }

    /// A user-supplied grid, e.g. for rare diseases where most of the
    /// interesting range sits below 1%.
    pub fn explicit(points: Vec<Probability>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "a grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing ({} is followed by {})",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Probability] {
        &self.points
    }

    pub fn start(&self) -> Probability {
        self.points[0]
    }

    pub fn end(&self) -> Probability {
        self.points[self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Probability) -> bool {
        self.start() <= p && p <= self.end()
    }
}

impl Default for PrevalenceGrid {
    /// 0 to 1 inclusive in 101 steps.
    fn default() -> Self {
        Self::linear(Probability::ZERO, Probability::ONE, DEFAULT_GRID_STEPS)
            .expect("default grid is valid")
    }
}

/// Relative per-person costs of the two misclassification errors, in any
/// unit the user chooses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub cost_per_false_alarm: f64,
    pub cost_per_missed_case: f64,
}

impl CostWeights {
    pub fn new(cost_per_false_alarm: f64, cost_per_missed_case: f64) -> Result<Self> {
        for (name, v) in [
            ("cost per false alarm", cost_per_false_alarm),
            ("cost per missed case", cost_per_missed_case),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidCosts(format!(
                    "{name} must be a finite non-negative number, got {v}"
                )));
            }
        }
        Ok(Self {
            cost_per_false_alarm,
            cost_per_missed_case,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.cost_per_false_alarm == 0.0 && self.cost_per_missed_case == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceCurve {
    pub characteristics: TestCharacteristics,
    pub points: Vec<TranslatedPerformance>,
    pub marker_prevalence: Option<Probability>,
    pub cost_weights: Option<CostWeights>,
}

impl PrevalenceCurve {
    /// The sweep point whose prevalence is closest to `prev`.
    pub fn nearest(&self, prev: Probability) -> Option<&TranslatedPerformance> {
        self.points.iter().min_by(|a, b| {
            let da = (a.prevalence.value() - prev.value()).abs();
            let db = (b.prevalence.value() - prev.value()).abs();
            da.total_cmp(&db)
        })
    }
}

/// Evaluates the test at every grid point, in grid order.
pub fn sweep(
    chars: &TestCharacteristics,
    grid: &PrevalenceGrid,
    marker: Option<Probability>,
    costs: Option<CostWeights>,
) -> Result<PrevalenceCurve> {
    if let Some(m) = marker {
        if !grid.contains(m) {
            return Err(Error::MarkerOutsideGrid {
                marker: m.value(),
                start: grid.start().value(),
                end: grid.end().value(),
            });
        }
    }
    let points = grid
        .points()
        .iter()
        .map(|&prev| translate(chars, prev, costs.as_ref()))
        .collect();
    Ok(PrevalenceCurve {
        characteristics: chars.clone(),
        points,
        marker_prevalence: marker,
        cost_weights: costs,
    })
}

/// Expected misclassification cost per person tested:
/// `(1 - spec)(1 - prev) * cost_fa + (1 - sens) * prev * cost_md`.
pub fn expected_cost_per_person(
    chars: &TestCharacteristics,
    prev: Probability,
    costs: &CostWeights,
) -> f64 {
    let false_alarms = (1.0 - chars.specificity.value()) * (1.0 - prev.value());
    let missed = (1.0 - chars.sensitivity.value()) * prev.value();
    false_alarms * costs.cost_per_false_alarm + missed * costs.cost_per_missed_case
}

pub fn cost_curve(
    chars: &TestCharacteristics,
    grid: &PrevalenceGrid,
    costs: &CostWeights,
) -> Vec<(Probability, f64)> {
    grid.points()
        .iter()
        .map(|&prev| (prev, expected_cost_per_person(chars, prev, costs)))
        .collect()
}

pub const TABLE_COLUMNS: [&str; 8] = [
    "prevalence",
    "ppv",
    "npv",
    "false_alarm_rate",
    "missed_case_rate",
    "tests_per_detected_case",
    "positive_test_rate",
    "accuracy",
];
pub const COST_COLUMN: &str = "expected_cost";

/// Row-per-prevalence view of a curve. `None` cells are undefined values.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl PrevalenceTable {
    /// CSV with a header row; undefined cells are empty and numbers use the
    /// shortest representation that round-trips exactly.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|cell| match cell {
                Some(v) => v.to_string(),
                None => String::new(),
            }))
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing CSV to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

pub fn curve_to_table(curve: &PrevalenceCurve) -> PrevalenceTable {
    let with_cost = curve.cost_weights.is_some();
    let mut columns = TABLE_COLUMNS.to_vec();
    if with_cost {
        columns.push(COST_COLUMN);
    }
    let rows = curve
        .points
        .iter()
        .map(|pt| {
            let mut row = vec![
                Some(pt.prevalence.value()),
                pt.ppv.map(Probability::value),
                pt.npv.map(Probability::value),
                pt.false_alarm_rate.map(Probability::value),
                pt.missed_case_rate.map(Probability::value),
                pt.tests_per_detected_case,
                Some(pt.positive_test_rate.value()),
                Some(pt.accuracy.value()),
            ];
            if with_cost {
                row.push(pt.expected_cost);
            }
            row
        })
        .collect();
    PrevalenceTable { columns, rows }
}
