//! CSV rows and JSON summaries.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::Flag;

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the CSV report.
pub const COLUMNS: [&str; 13] = [
    "experiment_id",
    "n",
    "p",
    "q",
    "R",
    "M",
    "delta",
    "term",
    "norm_value",
    "abs_error",
    "slope",
    "residual",
    "flags",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment_id: String,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub delta: Option<f64>,
    pub term: Option<String>,
    pub norm_value: Option<f64>,
    pub abs_error: Option<f64>,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    /// `;`-separated flag names.
    pub flags: String,
}

impl ReportRow {
    pub fn new(id: &str) -> Self {
        Self {
            experiment_id: id.to_string(),
            ..Self::default()
        }
    }

    pub fn with_flags(mut self, flags: &[Flag]) -> Self {
        self.flags = flags
            .iter()
            .map(Flag::to_string)
            .collect::<Vec<_>>()
            .join(";");
        self
    }

    pub fn flag_list(&self) -> Vec<&str> {
        self.flags.split(';').filter(|f| !f.is_empty()).collect()
    }
}

/// Per-experiment summary entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub slope: Option<f64>,
    pub expected_slope: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// Further measured quantities by name.
    pub measured: BTreeMap<String, f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub schema_version: u32,
    pub seed: u64,
    pub pass: bool,
    pub experiments: Vec<Summary>,
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => io_error(path, source),
        other => Error::Report(format!("{}: {other:?}", path.display())),
    }
}

/// Single-threaded CSV sink; rows are flushed after every experiment.
pub struct ReportWriter {
    path: PathBuf,
    inner: csv::Writer<File>,
}

impl ReportWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        let mut inner = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        inner
            .write_record(COLUMNS)
            .map_err(|e| csv_error(path, e))?;
        inner.flush().map_err(|e| io_error(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            inner,
        })
    }

    pub fn write_rows(&mut self, rows: &[ReportRow]) -> Result<()> {
        for row in rows {
            self.inner
                .serialize(row)
                .map_err(|e| csv_error(&self.path, e))?;
        }
        self.inner.flush().map_err(|e| io_error(&self.path, e))
    }
}

pub fn write_summary(path: &Path, doc: &SummaryDocument) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Error::Report(e.to_string()))?;
    let mut file = File::create(path).map_err(|e| io_error(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| io_error(path, e))?;
    file.write_all(b"\n").map_err(|e| io_error(path, e))
}

const FLAG_NAMES: [&str; 3] = ["divergent", "truncation-unstable", "excluded-from-fit"];

/// Checks a report against the column list and the cell rules; returns its rows.
pub fn validate_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Report(format!(
            "{}: header {:?} does not match the published columns",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (idx, record) in reader.deserialize::<ReportRow>().enumerate() {
        let line = idx + 2;
        let row =
            record.map_err(|e| Error::Report(format!("{} line {line}: {e}", path.display())))?;
        let flags = row.flag_list();
        if let Some(bad) = flags.iter().find(|f| !FLAG_NAMES.contains(f)) {
            return Err(Error::Report(format!(
                "{} line {line}: unknown flag '{bad}'",
                path.display()
            )));
        }
        let measured = [
            row.r,
            row.m,
            row.delta,
            row.norm_value,
            row.abs_error,
            row.slope,
            row.residual,
        ];
        if measured.iter().flatten().any(|x| !x.is_finite()) && !flags.contains(&"divergent") {
            return Err(Error::Report(format!(
                "{} line {line}: non-finite value without a divergent flag",
                path.display()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut w = ReportWriter::create(&path).unwrap();
        let mut row = ReportRow::new("a");
        row.n = Some(3);
        row.r = Some(8.0);
        row.norm_value = Some(1.25);
        let row = row.with_flags(&[Flag::ExcludedFromFit]);
        w.write_rows(std::slice::from_ref(&row)).unwrap();
        drop(w);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "experiment_id,n,p,q,R,M,delta,term,norm_value,abs_error,slope,residual,flags\n"
        ));
        assert_eq!(validate_report(&path).unwrap(), vec![row]);
    }

    #[test]
    fn empty_report_has_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        drop(ReportWriter::create(&path).unwrap());
        assert!(validate_report(&path).unwrap().is_empty());
    }

    #[test]
    fn rejects_unflagged_infinities_and_bad_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let header = COLUMNS.join(",");
        std::fs::write(&path, format!("{header}\na,3,2,4,8,,,full,inf,,,,\n")).unwrap();
        assert!(validate_report(&path).is_err());
        std::fs::write(
            &path,
            format!("{header}\na,3,2,4,8,,,full,inf,,,,divergent\n"),
        )
        .unwrap();
        assert!(validate_report(&path).is_ok());
        std::fs::write(&path, format!("{header}\na,3,2,4,8,,,full,1,,,,wobbly\n")).unwrap();
        assert!(validate_report(&path).is_err());
        std::fs::write(&path, "id,n\n").unwrap();
        assert!(validate_report(&path).is_err());
        assert!(matches!(
            validate_report(&dir.path().join("missing.csv")),
            Err(Error::Io { .. })
        ));
    }
}
