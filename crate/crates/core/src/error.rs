use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must lie in [0, 1], got {value}")]
    InvalidProbability { what: &'static str, value: f64 },

    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    InvalidConfidenceLevel(f64),

    #[error("no diseased samples (tp + fn == 0): sensitivity is undefined")]
    NoDiseasedSamples,

    #[error("no healthy samples (fp + tn == 0): specificity is undefined")]
    NoHealthySamples,

    #[error("no positive tests at this prevalence: PPV is undefined")]
    NoPositiveTests,

    #[error("no negative tests at this prevalence: NPV is undefined")]
    NoNegativeTests,

    #[error("no detectable cases (sensitivity x prevalence == 0)")]
    NoDetectableCases,

    #[error("degenerate test characteristics: {0}")]
    Degenerate(&'static str),

    #[error("binomial interval needs at least one trial")]
    NoTrials,

    #[error("{successes} successes out of {trials} trials is impossible")]
    SuccessesExceedTrials { successes: u64, trials: u64 },

    #[error("invalid prevalence grid: {0}")]
    InvalidGrid(String),

    #[error("invalid cost weights: {0}")]
    InvalidCosts(String),

    #[error("marker prevalence {marker} lies outside the grid range [{start}, {end}]")]
    MarkerOutsideGrid { marker: f64, start: f64, end: f64 },

    #[error("score must be finite, got {0}")]
    NonFiniteScore(f64),

    #[error("ROC analysis needs at least one diseased and one healthy sample ({diseased} diseased, {healthy} healthy)")]
    OneClassOnly { diseased: usize, healthy: usize },

    #[error("DeLong interval needs at least 2 samples per class ({diseased} diseased, {healthy} healthy)")]
    TooFewSamples { diseased: usize, healthy: usize },

    #[error("cannot plot an empty curve (need at least 2 points, got {0})")]
    EmptyCurve(usize),

    #[error("invalid plot options: {0}")]
    InvalidPlotOptions(String),

    #[error("invalid CSV configuration: {0}")]
    InvalidConfig(String),

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("row {row}: score {value:?} is not a finite number")]
    NonNumericScore { row: usize, value: String },

    #[error("CSV read error: {0}")]
    Csv(String),
}
