//! Space file formats.
//!
//! JSON: `{"mode":"metric"|"semimetric","labels":["..."],"d":[[...],...]}`,
//! with `labels` optional and `mode` defaulting to `metric`.
//! CSV: a square matrix, no header, comma-separated decimals.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::metric::{build_space, Mode, SemiMetricSpace};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad number {text:?} at row {row}, column {col}")]
    Number { text: String, row: usize, col: usize },
    #[error(transparent)]
    Space(#[from] Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub d: Vec<Vec<f64>>,
}

fn default_mode() -> Mode {
    Mode::Metric
}

impl SpaceFile {
    pub fn from_space(space: &SemiMetricSpace) -> Self {
        SpaceFile {
            mode: space.mode(),
            labels: space.labels().map(|l| l.to_vec()),
            d: space.rows(),
        }
    }

    pub fn into_space(self) -> Result<SemiMetricSpace, Error> {
        let space = build_space(&self.d, self.mode)?;
        match self.labels {
            Some(l) => space.with_labels(l),
            None => Ok(space),
        }
    }
}

/// Parses the JSON space format. `mode_override` replaces the file's mode.
pub fn space_from_json(text: &str, mode_override: Option<Mode>) -> Result<SemiMetricSpace, ParseError> {
    let mut file: SpaceFile = serde_json::from_str(text)?;
    if let Some(m) = mode_override {
        file.mode = m;
    }
    Ok(file.into_space()?)
}

pub fn space_to_json(space: &SemiMetricSpace) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_space(space)).expect("space serializes")
}

/// Reads the raw CSV matrix without validating it as a space.
pub fn matrix_from_csv(text: &str) -> Result<Vec<Vec<f64>>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(col, f)| {
                f.parse::<f64>().map_err(|_| ParseError::Number { text: f.to_string(), row, col })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    Ok(rows)
}

pub fn space_from_csv(text: &str, mode: Mode) -> Result<SemiMetricSpace, ParseError> {
    Ok(build_space(&matrix_from_csv(text)?, mode)?)
}
