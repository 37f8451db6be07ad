//! JSON matrix format: `{"dim": n, "entries": [[[re, im], ...], ...]}`, row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CMatrix, DensityOperator, HermitianMatrix, PositiveOperator, ToleranceProfile, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let entries = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { dim: m.nrows(), entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Shape("dim must be at least 1".into()));
        }
        if self.entries.len() != n || self.entries.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("entries do not form a {n}x{n} matrix")));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i][j];
            C64::new(re, im)
        }))
    }
}

/// Which invariants a loaded matrix must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadMode {
    Hermitian,
    Positive,
    Density,
}

/// A matrix validated according to a [`LoadMode`].
#[derive(Clone, Debug)]
pub enum LoadedOperator {
    Hermitian(HermitianMatrix),
    Positive(PositiveOperator),
    Density(DensityOperator),
}

impl LoadedOperator {
    pub fn matrix(&self) -> &CMatrix {
        match self {
            LoadedOperator::Hermitian(h) => h.matrix(),
            LoadedOperator::Positive(p) => p.matrix(),
            LoadedOperator::Density(d) => d.matrix(),
        }
    }

    pub fn positive(&self) -> Option<&PositiveOperator> {
        match self {
            LoadedOperator::Hermitian(_) => None,
            LoadedOperator::Positive(p) => Some(p),
            LoadedOperator::Density(d) => Some(d.as_positive()),
        }
    }
}

pub fn validate(file: &MatrixFile, mode: LoadMode, tol: &ToleranceProfile) -> Result<LoadedOperator> {
    let m = file.to_matrix()?;
    let h = HermitianMatrix::new(m, tol.hermitian_tol)?;
    if mode == LoadMode::Hermitian {
        return Ok(LoadedOperator::Hermitian(h));
    }
    let p = PositiveOperator::from_hermitian(h, tol.psd_tol)?;
    if mode == LoadMode::Positive {
        return Ok(LoadedOperator::Positive(p));
    }
    Ok(LoadedOperator::Density(DensityOperator::new(p)?))
}

pub fn parse_matrix(json: &str, mode: LoadMode, tol: &ToleranceProfile) -> Result<LoadedOperator> {
    let file: MatrixFile = serde_json::from_str(json)?;
    validate(&file, mode, tol)
}

/// A JSON list of matrix objects.
pub fn parse_family(json: &str, mode: LoadMode, tol: &ToleranceProfile) -> Result<Vec<LoadedOperator>> {
    let files: Vec<MatrixFile> = serde_json::from_str(json)?;
    files.iter().map(|f| validate(f, mode, tol)).collect()
}

/// Reads and validates one matrix file.
pub fn load_matrix_file(path: &Path, mode: LoadMode, tol: &ToleranceProfile) -> Result<LoadedOperator> {
    parse_matrix(&std::fs::read_to_string(path)?, mode, tol).map_err(|e| annotate(path, e))
}

/// Reads a file holding either one matrix object or a list of them.
pub fn load_family_file(path: &Path, mode: LoadMode, tol: &ToleranceProfile) -> Result<Vec<LoadedOperator>> {
    let text = std::fs::read_to_string(path)?;
    let r = match serde_json::from_str::<serde_json::Value>(&text)? {
        serde_json::Value::Array(_) => parse_family(&text, mode, tol),
        _ => parse_matrix(&text, mode, tol).map(|m| vec![m]),
    };
    r.map_err(|e| annotate(path, e))
}

// keeps invariant violations typed; only parse failures get the path prepended
fn annotate(path: &Path, e: Error) -> Error {
    match e {
        Error::Json(j) => Error::Parse(format!("{}: {j}", path.display())),
        Error::Shape(m) => Error::Shape(format!("{}: {m}", path.display())),
        other => other,
    }
}

pub fn to_json(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m)).expect("matrix serializes")
}
