//! Matrix text format: CSV with one row per line, `.` as the decimal
//! separator and no header. Blank lines are ignored; ragged rows, empty
//! fields and non-finite values are rejected.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| parse_entry(field.trim(), lineno + 1))
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("ragged row: {} entries, expected {w}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no rows".into(),
        });
    }
    Matrix::from_rows(&rows)
}

fn parse_entry(field: &str, line: usize) -> Result<f64> {
    let bad = |message: String| Error::Parse { line, message };
    if field.is_empty() {
        return Err(bad("empty field".into()));
    }
    let v: f64 = field.parse().map_err(|_| bad(format!("invalid number {field:?}")))?;
    if !v.is_finite() {
        return Err(bad(format!("non-finite value {field:?}")));
    }
    Ok(v)
}

/// Writes entries with the shortest representation that parses back exactly.
pub fn format_matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_csv(&text)
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    std::fs::write(path, format_matrix_csv(m))?;
    Ok(())
}
