//! Artifact writers and readers.
//!
//! Every CSV and SVG artifact starts with a manifest reference (`# manifest=…`
//! for CSV, an XML comment for SVG) and every JSON artifact wraps its body as
//! `{"manifest_hash": …, "body": …}`. Floats are written in shortest
//! round-trip form, so rerunning an experiment with the same manifest gives
//! byte-identical files.

mod svg;
mod table;

pub use svg::{bar_chart, line_chart, Series};
pub use table::{read_csv, write_csv, CsvTable};

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::Dataset;
use crate::sampler::ChainTrace;

/// Shortest string that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonArtifact<T> {
    pub manifest_hash: String,
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, manifest_hash: &str, body: &T) -> Result<()> {
    let wrapped = JsonArtifact {
        manifest_hash: manifest_hash.to_string(),
        body,
    };
    let mut s = serde_json::to_string_pretty(&wrapped)?;
    s.push('\n');
    write_text(path, &s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<JsonArtifact<T>> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

/// Manifest hash recorded in the first line of a CSV or SVG artifact.
pub fn manifest_reference(path: &Path) -> Result<Option<String>> {
    let text = read_text(path)?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let hash = first
        .strip_prefix("# manifest=")
        .or_else(|| first.strip_prefix("<!-- manifest=").and_then(|r| r.strip_suffix(" -->")));
    Ok(hash.map(str::to_string))
}

/// Dataset as CSV with columns `x1..xd`.
pub fn write_dataset(path: &Path, manifest_hash: &str, data: &Dataset) -> Result<()> {
    let header = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    let rows = data.rows().map(|r| r.iter().map(|&v| fmt_f64(v)).collect()).collect();
    write_csv(path, manifest_hash, &CsvTable { header, rows })
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let (_, table) = read_csv(path)?;
    let d = table.header.len();
    let mut values = Vec::with_capacity(table.rows.len() * d);
    for row in &table.rows {
        for cell in row {
            values.push(parse_f64(cell)?);
        }
    }
    Dataset::from_flat(d, values)
}

/// Trace CSV: `step, theta1..thetad, accepted, reflected`. Step 0 is the
/// initial state and carries empty flags.
pub fn write_trace(path: &Path, manifest_hash: &str, trace: &ChainTrace) -> Result<()> {
    let mut header = vec!["step".to_string()];
    header.extend((1..=trace.dim()).map(|j| format!("theta{j}")));
    header.push("accepted".into());
    header.push("reflected".into());
    let rows = trace
        .states()
        .enumerate()
        .map(|(t, s)| {
            let mut row = vec![t.to_string()];
            row.extend(s.iter().map(|&v| fmt_f64(v)));
            let flag = |f: &[bool]| if t == 0 { String::new() } else { (f[t - 1] as u8).to_string() };
            row.push(flag(&trace.accepted));
            row.push(flag(&trace.proposal_reflected));
            row
        })
        .collect();
    write_csv(path, manifest_hash, &CsvTable { header, rows })
}

pub fn read_trace(path: &Path) -> Result<ChainTrace> {
    let (_, table) = read_csv(path)?;
    let d = table
        .header
        .len()
        .checked_sub(3)
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Parse("trace needs step, state and flag columns".into()))?;
    let mut states = Vec::with_capacity(table.rows.len() * d);
    let mut accepted = Vec::new();
    let mut reflected = Vec::new();
    for (t, row) in table.rows.iter().enumerate() {
        for cell in &row[1..=d] {
            states.push(parse_f64(cell)?);
        }
        if t > 0 {
            accepted.push(row[d + 1] == "1");
            reflected.push(row[d + 2] == "1");
        }
    }
    ChainTrace::from_parts(d, states, accepted, reflected)
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{s}` is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{sample_data, MixtureSpec};

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e21, 7.359312880714854e-5, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let spec = MixtureSpec::along_first_axis(3, 1.5).unwrap();
        let data = sample_data(&spec, None, 40, 9).unwrap();
        write_dataset(&path, "abc", &data).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), data);
        assert_eq!(manifest_reference(&path).unwrap().as_deref(), Some("abc"));
    }

    #[test]
    fn trace_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let tr = ChainTrace::from_parts(2, vec![0.0, 1.0, 0.5, -1.0, 0.5, -1.0], vec![true, false], vec![false, true])
            .unwrap();
        write_trace(&path, "h", &tr).unwrap();
        assert_eq!(read_trace(&path).unwrap(), tr);
    }

    #[test]
    fn json_is_wrapped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_json(&path, "h1", &vec![1.5, 2.0]).unwrap();
        let back: JsonArtifact<Vec<f64>> = read_json(&path).unwrap();
        assert_eq!(back.manifest_hash, "h1");
        assert_eq!(back.body, vec![1.5, 2.0]);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_text(Path::new("/nonexistent/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
