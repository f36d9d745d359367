//! Matrix files.
//!
//! JSON: `{"n": 2, "entries": [[[re, im], [re, im]], [[re, im], [re, im]]]}`,
//! rows outermost. CSV: one matrix row per line, `re,im` pairs interleaved,
//! no header.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, C64};

#[derive(Deserialize)]
struct MatrixFile {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn from_entries(rows: Vec<Vec<C64>>) -> Result<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare { rows: n, row: r, cols: row.len() });
        }
    }
    ComplexMatrix::new(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

pub fn parse_matrix_json(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    if file.n != file.entries.len() {
        return Err(Error::Parse(format!(
            "declared n = {} but found {} rows",
            file.n,
            file.entries.len()
        )));
    }
    let rows = file
        .entries
        .into_iter()
        .map(|row| row.into_iter().map(|[re, im]| C64::new(re, im)).collect())
        .collect();
    from_entries(rows)
}

pub fn parse_matrix_csv(text: &str) -> Result<ComplexMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() % 2 != 0 {
            return Err(Error::Parse(format!(
                "row {} has an odd number of values",
                rows.len()
            )));
        }
        let values: Vec<f64> = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("{f:?}: {e}"))))
            .collect::<Result<_>>()?;
        rows.push(values.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    from_entries(rows)
}

/// Reads a matrix, choosing the format by extension (`.csv`, else JSON).
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_matrix_csv(&text),
        _ => parse_matrix_json(&text),
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let n = m.n();
    let rows: Vec<String> = (0..n)
        .map(|r| {
            let cells: Vec<String> = (0..n)
                .map(|c| format!("[{},{}]", number(m[(r, c)].re), number(m[(r, c)].im)))
                .collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("{{\"n\":{n},\"entries\":[{}]}}\n", rows.join(","))
}

pub fn matrix_to_csv(m: &ComplexMatrix) -> String {
    let n = m.n();
    let mut out = String::new();
    for r in 0..n {
        let cells: Vec<String> = (0..n)
            .flat_map(|c| [number(m[(r, c)].re), number(m[(r, c)].im)])
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => matrix_to_csv(m),
        _ => matrix_to_json(m),
    };
    fs::write(path, text)?;
    Ok(())
}
