//! The shared JSON matrix format: {"n_rows", "n_cols", "entries": [[re, im], ...]}.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<[f64; 2]>,
}

fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of the files
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// Serialize with 17 significant digits per component.
pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    write!(s, "{{\"n_rows\": {}, \"n_cols\": {}, \"entries\": [", m.rows(), m.cols()).unwrap();
    for (i, z) in m.as_slice().iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write!(s, "[{}, {}]", fmt17(z.re), fmt17(z.im)).unwrap();
    }
    s.push_str("]}");
    s
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let f: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let data = f.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    ComplexMatrix::new(f.n_rows, f.n_cols, data)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    matrix_from_json(&text)
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m) + "\n")
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// State vectors share the matrix format as n×1 columns.
pub fn read_vector(path: &Path) -> Result<Vec<Complex64>> {
    let m = read_matrix(path)?;
    if m.cols() != 1 {
        return Err(Error::Dimension(format!("state file holds a {}x{} matrix", m.rows(), m.cols())));
    }
    Ok(m.into_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.1, -1.0 / 3.0),
                Complex64::new(1e-300, 2.0f64.sqrt()),
                Complex64::new(-0.0, 12345.678901234567),
                Complex64::new(f64::MAX, f64::MIN_POSITIVE),
            ],
        )
        .unwrap();
        let text = matrix_to_json(&m);
        let back = matrix_from_json(&text).unwrap();
        assert_eq!(back, m);
        assert!(text.contains("[1.0000000000000001e-1, -3.3333333333333331e-1]"));
    }

    #[test]
    fn rejects_inconsistent_files() {
        assert!(matrix_from_json(r#"{"n_rows": 2, "n_cols": 1, "entries": [[1, 0]]}"#).is_err());
        assert!(matrix_from_json(r#"{"n_rows": 1, "n_cols": 1, "entries": [[1, 0]], "x": 1}"#).is_err());
        assert!(matrix_from_json("not json").is_err());
    }
}
