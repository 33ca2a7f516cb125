//! Matrix Market array format (`matrix array real general`).
//!
//! Values are written column-major with 17 significant digits, which
//! round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use eilscond::{Matrix, Vector};

use crate::CliError;

const HEADER: &str = "%%MatrixMarket matrix array real general";

pub fn to_string(a: &Matrix) -> Result<String, CliError> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Format("refusing to write non-finite values".into()));
    }
    let mut out = String::with_capacity(32 + 25 * a.len());
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "{} {}", a.nrows(), a.ncols());
    for v in a.iter() {
        let _ = writeln!(out, "{v:.16e}");
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<Matrix, CliError> {
    let bad = |msg: &str| CliError::Format(format!("Matrix Market: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields != ["%%matrixmarket", "matrix", "array", "real", "general"] {
        return Err(bad(&format!("unsupported header `{header}`")));
    }
    let mut body = lines.filter(|l| !l.trim_start().starts_with('%') && !l.trim().is_empty());
    let dims = body.next().ok_or_else(|| bad("missing size line"))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("bad size line")))
        .collect::<Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(bad("size line must have two entries"));
    };
    let values: Vec<f64> = body
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("bad value `{t}`"))))
        .collect::<Result<_, _>>()?;
    if values.len() != rows * cols {
        return Err(bad(&format!("expected {} values, found {}", rows * cols, values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value"));
    }
    Ok(Matrix::from_vec(rows, cols, values))
}

pub fn write_matrix(path: &Path, a: &Matrix) -> Result<(), CliError> {
    std::fs::write(path, to_string(a)?).map_err(|e| CliError::io(path, e))
}

pub fn write_vector(path: &Path, v: &Vector) -> Result<(), CliError> {
    write_matrix(path, &Matrix::from_column_slice(v.len(), 1, v.as_slice()))
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    parse(&std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)
}

pub fn read_vector(path: &Path) -> Result<Vector, CliError> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(CliError::Format(format!("{} holds a matrix, expected a column", path.display())));
    }
    Ok(m.column(0).into_owned())
}
