use crate::args::{Format, OutputArgs};
use crate::CliError;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "dU")]
    pub du: f64,
}

pub fn profile_rows(p: &mems_radial::RadialProfile) -> Vec<ProfileRow> {
    p.r.iter().zip(&p.u).zip(&p.du).map(|((&r, &u), &du)| ProfileRow { r, u, du }).collect()
}

/// Prepends `"schema": 1` to a summary object.
pub fn summary(body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("a Value always serialises");
    s.push(b'\n');
    s
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// Writes `rows` and `summary` in the requested format. CSV mode writes the table to
/// `--out` and the summary beside it; JSON mode writes one document with the rows
/// under `"rows"`.
pub fn emit<R: Serialize>(out: &OutputArgs, rows: &[R], summary: Value) -> Result<(), CliError> {
    match out.format {
        Format::Csv => {
            write_to(out.out.as_deref(), &csv_bytes(rows)?)?;
            let doc = json_bytes(&summary);
            match &out.out {
                Some(p) => write_to(Some(&summary_path(p)), &doc),
                None => io::stderr().write_all(&doc).map_err(|e| CliError::Io(e.to_string())),
            }
        }
        Format::Json => {
            let mut doc = summary;
            let rows = serde_json::to_value(rows).map_err(|e| CliError::Io(e.to_string()))?;
            doc.as_object_mut().expect("summaries are objects").insert("rows".into(), rows);
            write_to(out.out.as_deref(), &json_bytes(&doc))
        }
    }
}

/// A summary-only document (no table).
pub fn emit_document(path: Option<&Path>, doc: &Value) -> Result<(), CliError> {
    write_to(path, &json_bytes(doc))
}
