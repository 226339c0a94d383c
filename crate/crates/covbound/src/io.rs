//! Input parsing: covariance matrices from CSV or JSON files, spectra from
//! JSON or inline eigenvalue lists.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectra::{spectrum_of, CovarianceMatrix, Spectrum};

/// A resolved input: either a full matrix or just its spectrum.
#[derive(Debug, Clone)]
pub enum InputSource {
    Matrix(CovarianceMatrix),
    Spectrum(Spectrum),
}

impl InputSource {
    /// Spectrum of the input, computed from the matrix when needed.
    pub fn spectrum(&self) -> Result<Spectrum> {
        match self {
            InputSource::Matrix(m) => spectrum_of(m),
            InputSource::Spectrum(sp) => Ok(sp.clone()),
        }
    }

    /// A covariance matrix realizing the input; a bare spectrum becomes the
    /// diagonal matrix of its eigenvalues (every audited statistic is
    /// rotation invariant in distribution).
    pub fn matrix(&self) -> Result<CovarianceMatrix> {
        match self {
            InputSource::Matrix(m) => Ok(m.clone()),
            InputSource::Spectrum(sp) => CovarianceMatrix::diagonal(sp.eigenvalues()),
        }
    }
}

#[derive(Deserialize)]
struct MatrixJson {
    d: usize,
    entries: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct SpectrumJson {
    eigenvalues: Vec<f64>,
}

/// CSV matrix: d rows of d comma-separated decimal numbers.
pub fn parse_matrix_csv(text: &str) -> Result<CovarianceMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: {:?} is not a decimal number",
                        lineno + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix CSV is empty".into()));
    }
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::Parse(format!(
            "matrix CSV must be square: {} rows but row lengths {:?}",
            rows.len(),
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    CovarianceMatrix::from_rows(&rows)
}

/// JSON input: {"d": int, "entries": [[..]]} for a matrix or
/// {"eigenvalues": [..]} for a bare spectrum.
pub fn parse_json(text: &str) -> Result<InputSource> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    if value.get("eigenvalues").is_some() {
        let sj: SpectrumJson = serde_json::from_value(value)
            .map_err(|e| Error::Parse(format!("invalid spectrum JSON: {e}")))?;
        return Ok(InputSource::Spectrum(Spectrum::from_eigenvalues(
            sj.eigenvalues,
        )?));
    }
    let mj: MatrixJson = serde_json::from_value(value)
        .map_err(|e| Error::Parse(format!("invalid matrix JSON: {e}")))?;
    if mj.entries.len() != mj.d || mj.entries.iter().any(|r| r.len() != mj.d) {
        return Err(Error::Parse(format!(
            "matrix JSON declares d={} but entries are {}x{:?}",
            mj.d,
            mj.entries.len(),
            mj.entries.first().map(Vec::len).unwrap_or(0)
        )));
    }
    Ok(InputSource::Matrix(CovarianceMatrix::from_rows(
        &mj.entries,
    )?))
}

/// Load a matrix or spectrum file, sniffing JSON by its leading '{'.
pub fn load_source(path: &Path) -> Result<InputSource> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        parse_json(&text)
    } else {
        Ok(InputSource::Matrix(parse_matrix_csv(&text)?))
    }
}

/// Parse an inline eigenvalue list like "4,2,1".
pub fn parse_spectrum_list(text: &str) -> Result<Spectrum> {
    let eigenvalues = text
        .split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{:?} is not a decimal number", cell.trim())))
        })
        .collect::<Result<Vec<f64>>>()?;
    Spectrum::from_eigenvalues(eigenvalues)
}
