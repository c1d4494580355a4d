//! Input formats: long-format rating CSV and Leslie-Gower JSON.

use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use relfix_core::bailey::BaileyProblem;
use relfix_core::leslie_gower::LgModel;
use relfix_core::tensor::{for_each_index, strides};
use relfix_core::{Matrix, RatingProblem, RiskTensor};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: u64,
        column: String,
        message: String,
    },
    #[error("parse error at row {row}: duplicate cell {cell:?} (first seen at row {first})")]
    DuplicateCell { row: u64, first: u64, cell: Vec<usize> },
    #[error("bad header: {0}")]
    Header(String),
    #[error("no data rows")]
    Empty,
    #[error("cell {cell:?} is missing; the grid must be complete")]
    MissingCell { cell: Vec<usize> },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("row {row}: cell {cell:?} has zero exposure (pass --no-strict to allow empty cells)")]
    ZeroExposure { row: u64, cell: Vec<usize> },
    #[error("row {row}: cell {cell:?} has loss {loss} but zero exposure; exposure to risk is a necessary condition for loss")]
    LossWithoutExposure { row: u64, cell: Vec<usize>, loss: f64 },
    #[error("invalid model file {path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error(transparent)]
    Model(#[from] relfix_core::Error),
}

/// A dense rating grid read from CSV, before any solver-specific checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingData {
    pub axis_names: Vec<String>,
    pub dims: Vec<usize>,
    pub exposures: Vec<f64>,
    pub losses: Vec<f64>,
    /// `levels[t][s]`: the original index now stored at position `s` of axis `t`.
    pub levels: Vec<Vec<usize>>,
}

impl RatingData {
    pub fn to_problem(&self, plr: f64, strict: bool) -> Result<RatingProblem, IngestError> {
        let losses = RiskTensor::new(self.dims.clone(), self.losses.clone(), self.axis_names.clone())?;
        let exposures = RiskTensor::new(self.dims.clone(), self.exposures.clone(), self.axis_names.clone())?;
        Ok(RatingProblem::with_mode(losses, exposures, plr, strict)?)
    }

    /// Exposures become weights and `loss / exposure` the observed loss costs.
    pub fn to_bailey(&self) -> Result<BaileyProblem, IngestError> {
        if self.dims.len() != 2 {
            return Err(IngestError::DimensionMismatch(format!(
                "minimum-bias fitting takes two factors, file has {}",
                self.dims.len()
            )));
        }
        let (m, n) = (self.dims[0], self.dims[1]);
        if let Some(flat) = self.exposures.iter().position(|&e| e <= 0.0) {
            return Err(IngestError::ZeroExposure {
                row: 0,
                cell: vec![flat / n, flat % n],
            });
        }
        let r: Vec<f64> = self.losses.iter().zip(&self.exposures).map(|(l, e)| l / e).collect();
        Ok(BaileyProblem::new(
            Matrix::new(m, n, r)?,
            Matrix::new(m, n, self.exposures.clone())?,
        )?)
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads `path`; see [`parse_rating_csv`].
pub fn read_rating_csv(path: &Path, strict: bool, base_cell: Option<&[usize]>) -> Result<RatingData, IngestError> {
    parse_rating_csv(open(path)?, strict, base_cell)
}

/// Parses a header row followed by one row per cell: one 0-based index
/// column per factor, then `exposure`, then `loss`.
///
/// With `base_cell`, index 0 and the chosen index swap places on every axis
/// so that the chosen cell becomes the base cell.
pub fn parse_rating_csv<R: std::io::Read>(
    reader: R,
    strict: bool,
    base_cell: Option<&[usize]>,
) -> Result<RatingData, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IngestError::Header(e.to_string()))?
        .clone();
    let cols: Vec<String> = header.iter().map(str::to_string).collect();
    if cols.len() < 4 {
        return Err(IngestError::Header(format!(
            "need at least two index columns plus exposure and loss, got {} columns",
            cols.len()
        )));
    }
    let n = cols.len() - 2;
    if !cols[n].eq_ignore_ascii_case("exposure") || !cols[n + 1].eq_ignore_ascii_case("loss") {
        return Err(IngestError::Header(format!(
            "last two columns must be `exposure` and `loss`, got `{}` and `{}`",
            cols[n],
            cols[n + 1]
        )));
    }

    struct Row {
        line: u64,
        cell: Vec<usize>,
        exposure: f64,
        loss: f64,
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| IngestError::Parse {
            row: e.position().map_or(0, |p| p.line()),
            column: "-".into(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(k).unwrap_or("");
        let mut cell = Vec::with_capacity(n);
        for (k, name) in cols.iter().enumerate().take(n) {
            let idx = field(k).parse::<usize>().map_err(|e| IngestError::Parse {
                row: line,
                column: name.clone(),
                message: format!("`{}` is not a non-negative integer index ({e})", field(k)),
            })?;
            cell.push(idx);
        }
        let number = |k: usize| -> Result<f64, IngestError> {
            let v = field(k).parse::<f64>().map_err(|e| IngestError::Parse {
                row: line,
                column: cols[k].clone(),
                message: format!("`{}` is not a number ({e})", field(k)),
            })?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(IngestError::Parse {
                    row: line,
                    column: cols[k].clone(),
                    message: format!("{v} is negative or not finite"),
                });
            }
            Ok(v)
        };
        let exposure = number(n)?;
        let loss = number(n + 1)?;
        if loss > 0.0 && exposure == 0.0 {
            return Err(IngestError::LossWithoutExposure { row: line, cell, loss });
        }
        if strict && exposure == 0.0 {
            return Err(IngestError::ZeroExposure { row: line, cell });
        }
        rows.push(Row {
            line,
            cell,
            exposure,
            loss,
        });
    }
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }

    let dims: Vec<usize> = (0..n)
        .map(|t| rows.iter().map(|r| r.cell[t]).max().unwrap_or(0) + 1)
        .collect();
    let levels: Vec<Vec<usize>> = match base_cell {
        None => dims.iter().map(|&d| (0..d).collect()).collect(),
        Some(base) => {
            if base.len() != n {
                return Err(IngestError::DimensionMismatch(format!(
                    "base cell has {} indices but the file has {n} factors",
                    base.len()
                )));
            }
            let mut levels = Vec::with_capacity(n);
            for (t, (&b, &d)) in base.iter().zip(&dims).enumerate() {
                if b >= d {
                    return Err(IngestError::DimensionMismatch(format!(
                        "base cell index {b} is out of range for factor {t} of size {d}"
                    )));
                }
                let mut order: Vec<usize> = (0..d).collect();
                order.swap(0, b);
                levels.push(order);
            }
            levels
        }
    };

    let len: usize = dims.iter().product();
    let st = strides(&dims);
    let mut exposures = vec![0.0; len];
    let mut losses = vec![0.0; len];
    let mut seen: HashMap<usize, u64> = HashMap::with_capacity(len);
    for row in &rows {
        // swapping is its own inverse, so the position of an original index is levels[t][index]
        let flat: usize = row
            .cell
            .iter()
            .enumerate()
            .map(|(t, &i)| levels[t][i] * st[t])
            .sum();
        if let Some(&first) = seen.get(&flat) {
            return Err(IngestError::DuplicateCell {
                row: row.line,
                first,
                cell: row.cell.clone(),
            });
        }
        seen.insert(flat, row.line);
        exposures[flat] = row.exposure;
        losses[flat] = row.loss;
    }
    if seen.len() != len {
        let mut missing = None;
        for_each_index(&dims, |idx, flat| {
            if missing.is_none() && !seen.contains_key(&flat) {
                missing = Some(idx.iter().enumerate().map(|(t, &s)| levels[t][s]).collect());
            }
        });
        return Err(IngestError::MissingCell {
            cell: missing.expect("some cell is missing"),
        });
    }

    Ok(RatingData {
        axis_names: cols[..n].to_vec(),
        dims,
        exposures,
        losses,
        levels,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LgInput {
    b: Vec<f64>,
    #[serde(rename = "C")]
    c: MatrixInput,
}

/// Reads `{"b": [...], "C": [...]}` with `C` row-major, either flat or as
/// nested rows.
pub fn read_lg_json(path: &Path) -> Result<LgModel, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_lg_json(&text).map_err(|e| match e {
        IngestError::Json { message, .. } => IngestError::Json {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_lg_json(text: &str) -> Result<LgModel, IngestError> {
    let json_err = |message: String| IngestError::Json {
        path: PathBuf::from("<input>"),
        message,
    };
    let input: LgInput = serde_json::from_str(text).map_err(|e| json_err(e.to_string()))?;
    let d = input.b.len();
    let c = match input.c {
        MatrixInput::Flat(v) => {
            if v.len() != d * d {
                return Err(json_err(format!("C has {} entries, expected {d}x{d}", v.len())));
            }
            Matrix::new(d, d, v)?
        }
        MatrixInput::Nested(rows) => {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(json_err(format!("C must have {d} rows of {d} entries")));
            }
            Matrix::from_rows(&rows)?
        }
    };
    Ok(LgModel::new(input.b, c)?)
}
