//! Deterministic serialization and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shg2d::analysis::ResonanceScan;

use crate::commands::{Report, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: String,
    #[serde(flatten)]
    pub report: Report,
}

impl Envelope {
    pub fn new(report: Report) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            report,
        }
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's map is a BTreeMap unless preserve_order is enabled
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn error_json(e: &shg2d::Error) -> String {
    let v = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "code": e.code(), "message": e.to_string() },
    });
    to_sorted_json(&v).expect("error object serializes")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn scan_csv(scan: &ResonanceScan) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["delta", "coefficient", "mode", "cond_number"])?;
    for p in &scan.points {
        w.write_record([
            p.delta.to_string(),
            opt(p.coefficient),
            p.mode.to_string(),
            opt(p.condition_number),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
