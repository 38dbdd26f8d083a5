use std::path::Path;

use crate::error::{Error, Result};

use super::{read_text, write_text};

/// String cells under a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }
}

pub fn write_csv(path: &Path, manifest_hash: &str, table: &CsvTable) -> Result<()> {
    let width = table.header.len();
    if let Some(bad) = table.rows.iter().find(|r| r.len() != width) {
        return Err(Error::invalid(
            "rows",
            format!("row has {} cells, header has {width}", bad.len()),
        ));
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(&table.header).map_err(to_err)?;
    for r in &table.rows {
        w.write_record(r).map_err(to_err)?;
    }
    let body = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| Error::Parse(e.to_string()))?;
    write_text(path, &format!("# manifest={manifest_hash}\n{body}"))
}

/// Returns the manifest hash (if present) and the table.
pub fn read_csv(path: &Path) -> Result<(Option<String>, CsvTable)> {
    let text = read_text(path)?;
    let hash = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# manifest="))
        .map(str::to_string);
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let to_err = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    let header = r.headers().map_err(to_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(to_err)?.iter().map(str::to_string).collect());
    }
    Ok((hash, CsvTable { header, rows }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_quoting() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = CsvTable::new(&["name", "value"]);
        t.push(vec!["a,b".into(), "1.5".into()]);
        t.push(vec!["plain".into(), "".into()]);
        write_csv(&path, "ff00", &t).unwrap();
        let (hash, back) = read_csv(&path).unwrap();
        assert_eq!(hash.as_deref(), Some("ff00"));
        assert_eq!(back, t);
        assert_eq!(back.column("value").unwrap(), vec!["1.5", ""]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec!["1".into()]);
        assert!(write_csv(&dir.path().join("t.csv"), "h", &t).is_err());
    }
}
