//! JSON-lines SPD datasets: one `{"label", "dim", "matrix"[, "ridge"]}`
//! object per line, `matrix` holding `dim²` entries in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use mccm::SpdMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpdRecord {
    pub label: String,
    pub dim: usize,
    pub matrix: Vec<f64>,
    /// Regularization added when the matrix was built from features.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
}

impl SpdRecord {
    pub fn new(label: impl Into<String>, m: &SpdMatrix) -> Self {
        Self {
            label: label.into(),
            dim: m.dim(),
            matrix: m.as_mat().as_slice().to_vec(),
            ridge: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPoint {
    pub label: String,
    pub matrix: SpdMatrix,
}

/// Reads a dataset; blank lines are skipped, line numbers are 1-based.
pub fn load_dataset(path: &Path) -> Result<Vec<LabeledPoint>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset(&text, path)
}

pub fn parse_dataset(text: &str, path: &Path) -> Result<Vec<LabeledPoint>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let rec: SpdRecord = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        if rec.dim == 0 || rec.matrix.len() != rec.dim * rec.dim {
            return Err(parse_err(format!(
                "dim {} needs {} matrix entries, found {}",
                rec.dim,
                rec.dim * rec.dim,
                rec.matrix.len()
            )));
        }
        let matrix = SpdMatrix::from_row_major(rec.dim, rec.matrix).map_err(|source| {
            let min_eigenvalue = match &source {
                mccm::Error::NotPositiveDefinite { min_eigenvalue, .. } => Some(*min_eigenvalue),
                _ => None,
            };
            CliError::InvalidSpd {
                path: path.to_path_buf(),
                line: line_no,
                min_eigenvalue,
                source,
            }
        })?;
        out.push(LabeledPoint {
            label: rec.label,
            matrix,
        });
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut w: W, records: &[SpdRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_records(path: &Path, records: &[SpdRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_records(std::io::BufWriter::new(file), records).map_err(|e| CliError::io(path, e))
}

pub fn save_dataset(path: &Path, points: &[LabeledPoint]) -> Result<()> {
    let records: Vec<SpdRecord> = points.iter().map(|p| SpdRecord::new(&p.label, &p.matrix)).collect();
    save_records(path, &records)
}

/// Distinct labels in order of first appearance.
pub fn label_order(points: &[LabeledPoint]) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for p in points {
        if !seen.contains(&p.label) {
            seen.push(p.label.clone());
        }
    }
    seen
}
