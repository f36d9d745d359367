//! Report rows and their CSV and JSON encodings.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! that reports are lossless and byte-stable. Non-finite values become empty
//! CSV fields and JSON `null`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use opgeom::{UnitVector, Verdict};
use serde::Deserialize;
use sha2::{Digest, Sha256};

pub const CSV_HEADER: &str = "instance_id,check_name,lhs,rhs,margin,verdict,witness_digest,wall_time_ms";

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ReportRow {
    pub instance_id: usize,
    pub check_name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: String,
    pub witness_digest: String,
    pub wall_time_ms: u64,
}

impl ReportRow {
    pub fn new(
        instance_id: usize,
        check_name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        margin: f64,
        verdict: &str,
        witness_digest: String,
    ) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        Self {
            instance_id,
            check_name: check_name.into(),
            lhs: finite(lhs),
            rhs: finite(rhs),
            margin: finite(margin),
            verdict: verdict.to_string(),
            witness_digest,
            wall_time_ms: 0,
        }
    }

    pub fn from_verdict(
        instance_id: usize,
        check_name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        margin: f64,
        verdict: Verdict,
        witness_digest: String,
    ) -> Self {
        Self::new(instance_id, check_name, lhs, rhs, margin, verdict.as_str(), witness_digest)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// JSON for a `.json` extension, CSV otherwise.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

/// First 16 hex digits of the SHA-256 of the witness entries, each written
/// as little-endian real then imaginary part. Empty when there is no witness.
pub fn witness_digest(witness: Option<&UnitVector>) -> String {
    let Some(w) = witness else {
        return String::new();
    };
    let mut hasher = Sha256::new();
    for z in w.as_vector().iter() {
        hasher.update(z.re.to_le_bytes());
        hasher.update(z.im.to_le_bytes());
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn number(x: Option<f64>) -> Option<String> {
    x.map(|v| format!("{v:.16e}"))
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.instance_id.to_string(),
            r.check_name.clone(),
            number(r.lhs).unwrap_or_default(),
            number(r.rhs).unwrap_or_default(),
            number(r.margin).unwrap_or_default(),
            r.verdict.clone(),
            r.witness_digest.clone(),
            r.wall_time_ms.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ReportRow]) -> String {
    let quote = |s: &str| serde_json::to_string(s).expect("strings always serialize");
    let num = |x: Option<f64>| number(x).unwrap_or_else(|| "null".into());
    let items: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{{\"instance_id\":{},\"check_name\":{},\"lhs\":{},\"rhs\":{},\"margin\":{},\"verdict\":{},\"witness_digest\":{},\"wall_time_ms\":{}}}",
                r.instance_id,
                quote(&r.check_name),
                num(r.lhs),
                num(r.rhs),
                num(r.margin),
                quote(&r.verdict),
                quote(&r.witness_digest),
                r.wall_time_ms
            )
        })
        .collect();
    if items.is_empty() {
        "[]\n".into()
    } else {
        format!("[\n{}\n]\n", items.join(",\n"))
    }
}

pub fn render(rows: &[ReportRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(rows),
        ReportFormat::Json => to_json(rows),
    }
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(rows: &[ReportRow], format: ReportFormat, path: Option<&Path>) -> io::Result<()> {
    let text = render(rows, format);
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
