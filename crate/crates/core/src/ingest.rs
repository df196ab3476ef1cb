//! Reading scored, labeled samples from delimited text.

use std::io::Read;

use crate::error::{Error, Result};
use crate::roc::{Label, ScoredSample};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvIngestConfig {
    /// Header name, or a 0-based column index when `has_header` is false.
    pub score_column: String,
    pub label_column: String,
    /// Rows whose (trimmed) label equals this are diseased; all others healthy.
    pub positive_label: String,
    pub delimiter: u8,
    pub has_header: bool,
    /// Negate every score, for assays where lower readouts are more disease-like.
    pub invert_scores: bool,
}

impl Default for CsvIngestConfig {
    fn default() -> Self {
        Self {
            score_column: "score".to_string(),
            label_column: "label".to_string(),
            positive_label: "1".to_string(),
            delimiter: b',',
            has_header: true,
            invert_scores: false,
        }
    }
}

fn locate(headers: Option<&csv::StringRecord>, column: &str) -> Result<usize> {
    match headers {
        Some(h) => h
            .iter()
            .position(|name| name.trim() == column)
            .ok_or_else(|| Error::MissingColumn(column.to_string())),
        None => column
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::MissingColumn(format!("{column} (expected a 0-based index without a header)"))),
    }
}

/// Parses one sample per data row. Row numbers in errors count data rows
/// from 1, not counting the header.
pub fn parse_samples_csv<R: Read>(reader: R, config: &CsvIngestConfig) -> Result<Vec<ScoredSample>> {
    if config.score_column == config.label_column {
        return Err(Error::InvalidConfig(
            "score and label columns must differ".to_string(),
        ));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(config.delimiter)
        .has_headers(config.has_header)
        .flexible(true)
        .from_reader(reader);

    let headers = if config.has_header {
        Some(
            rdr.headers()
                .map_err(|e| Error::Csv(e.to_string()))?
                .clone(),
        )
    } else {
        None
    };
    let score_idx = locate(headers.as_ref(), &config.score_column)?;
    let label_idx = locate(headers.as_ref(), &config.label_column)?;

    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let field = |idx: usize, what: &str| {
            record.get(idx).ok_or_else(|| Error::MalformedRow {
                row,
                reason: format!(
                    "expected a {what} in column {} but the row has only {} fields",
                    idx + 1,
                    record.len()
                ),
            })
        };
        let raw_score = field(score_idx, "score")?.trim();
        let label = field(label_idx, "label")?.trim();

        let score: f64 = raw_score.parse().map_err(|_| Error::MalformedRow {
            row,
            reason: format!("score {raw_score:?} is not a number"),
        })?;
        if !score.is_finite() {
            return Err(Error::NonNumericScore {
                row,
                value: raw_score.to_string(),
            });
        }
        let label = if label == config.positive_label {
            Label::Diseased
        } else {
            Label::Healthy
        };
        let score = if config.invert_scores { -score } else { score };
        samples.push(ScoredSample::new(score, label)?);
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn allergy_config() -> CsvIngestConfig {
        CsvIngestConfig {
            positive_label: "allergic".into(),
            ..CsvIngestConfig::default()
        }
    }

    #[test]
    fn one_sample_per_row() {
        let s = parse_samples_csv("score,label\n0.9,allergic\n0.1,tolerant".as_bytes(), &allergy_config()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].label(), Label::Diseased);
        assert_eq!(s[1].label(), Label::Healthy);
        assert_eq!(s[0].score(), 0.9);
    }

    #[test]
    fn empty_data_section_yields_no_samples() {
        let s = parse_samples_csv("score,label\n".as_bytes(), &allergy_config()).unwrap();
        assert!(s.is_empty());
        assert!(matches!(
            crate::roc::empirical_roc(&s),
            Err(Error::OneClassOnly { .. })
        ));
    }

    #[test]
    fn non_numeric_score_names_the_row() {
        let mut text = String::from("score,label\n");
        for i in 0..6 {
            text.push_str(&format!("{i},allergic\n"));
        }
        text.push_str("high,tolerant\n");
        let err = parse_samples_csv(text.as_bytes(), &allergy_config()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { row: 7, .. }), "{err:?}");
        assert!(err.to_string().contains("row 7"));
    }

    #[test]
    fn short_row_is_malformed() {
        let err = parse_samples_csv("label,score\nallergic,1\ntolerant".as_bytes(), &allergy_config()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { row: 2, .. }), "{err:?}");
    }

    #[test]
    fn nan_score_rejected() {
        let err = parse_samples_csv("score,label\nNaN,allergic".as_bytes(), &allergy_config()).unwrap_err();
        assert!(matches!(err, Error::NonNumericScore { row: 1, .. }));
    }

    #[test]
    fn missing_column() {
        let err = parse_samples_csv("value,label\n1,a".as_bytes(), &allergy_config()).unwrap_err();
        assert_eq!(err, Error::MissingColumn("score".into()));
    }

    #[test]
    fn same_column_for_score_and_label_is_invalid() {
        let cfg = CsvIngestConfig {
            label_column: "score".into(),
            ..CsvIngestConfig::default()
        };
        assert!(matches!(
            parse_samples_csv("score\n1".as_bytes(), &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn headerless_semicolon_inverted() {
        let cfg = CsvIngestConfig {
            score_column: "1".into(),
            label_column: "0".into(),
            positive_label: "D".into(),
            delimiter: b';',
            has_header: false,
            invert_scores: true,
        };
        let s = parse_samples_csv("D; 2.5\nH;-1\n\n".as_bytes(), &cfg).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].score(), -2.5);
        assert_eq!(s[1].score(), 1.0);
        assert!(s[0].is_diseased());
    }
}
