//! Distance-matrix files: JSON `{"labels": [...], "dist": [[...]]}` and CSV
//! with a header row of labels over a square numeric body.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dendrogram::csv_field;
use crate::metric::{FiniteMetricSpace, MetricError, Validation};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("IoError: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("ParseError: {0}")]
    Parse(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        Self {
            labels: space.labels().to_vec(),
            dist: space.to_rows(),
        }
    }

    pub fn into_space(self, validation: &Validation) -> Result<FiniteMetricSpace, MetricError> {
        FiniteMetricSpace::build(self.labels, self.dist, validation)
    }
}

pub fn parse_matrix_json(text: &str, validation: &Validation) -> Result<FiniteMetricSpace, IoError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    Ok(file.into_space(validation)?)
}

/// Lines starting with `#` are skipped.
pub fn parse_matrix_csv(text: &str, validation: &Validation) -> Result<FiniteMetricSpace, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse = |e: csv::Error| IoError::Parse(e.to_string());
    let labels: Vec<String> = reader.headers().map_err(parse)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(parse)?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field
                    .parse::<f64>()
                    .map_err(|_| IoError::Parse(format!("row {}, column {}: {field:?} is not a number", r + 1, c + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(FiniteMetricSpace::build(labels, rows, validation)?)
}

/// Chooses the parser by extension: `.csv` is CSV, anything else JSON.
pub fn read_matrix(path: &Path, validation: &Validation) -> Result<FiniteMetricSpace, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_matrix_csv(&text, validation)
    } else {
        parse_matrix_json(&text, validation)
    }
}

pub fn matrix_to_json(space: &FiniteMetricSpace) -> String {
    serde_json::to_string(&MatrixFile::from_space(space)).expect("matrix serializes")
}

pub fn matrix_to_csv(space: &FiniteMetricSpace) -> String {
    let mut out = space.labels().iter().map(|l| csv_field(l)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in space.to_rows() {
        out.push_str(&row.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
