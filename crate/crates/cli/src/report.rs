//! Reports: a JSON document embedding the resolved config, a CSV table and a
//! plain-text rendering of both.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Outcome class of a run, mapped to the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Indeterminate,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Indeterminate => 2,
        }
    }
}

/// Rows of strings under a fixed header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)
            .map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn render(&self, out: &mut String) {
        let width: Vec<usize> = (0..self.header.len())
            .map(|j| {
                self.rows
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain([self.header[j].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&self.header, out);
        for r in &self.rows {
            line(r, out);
        }
    }
}

/// Full-precision cell text; `inf` and `nan` spelled out.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub task: String,
    pub status: Status,
    /// `sha256:` digest of the resolved config and any model file it reads.
    pub input_hash: String,
    pub config: RunConfig,
    pub result: Value,
    #[serde(skip)]
    pub summary: Vec<(String, String)>,
    #[serde(skip)]
    pub table: Table,
}

/// Git-style content hash: the digest of `"blob <len>\0"` followed by the
/// bytes, over the canonical JSON of the config and then each extra input.
pub fn input_hash(config: &RunConfig, extra: &[Vec<u8>]) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    let mut h = Sha256::new();
    for part in std::iter::once(&canonical).chain(extra) {
        h.update(format!("blob {}\0", part.len()).as_bytes());
        h.update(part);
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task: {}", self.task);
        let _ = writeln!(out, "status: {:?}", self.status);
        let _ = writeln!(out, "input hash: {}", self.input_hash);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k}: {v}");
        }
        if !self.table.header.is_empty() {
            out.push('\n');
            self.table.render(&mut out);
        }
        out
    }

    /// Writes `<task>.json` and `<task>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let json = dir.join(format!("{}.json", self.task));
        let csv = dir.join(format!("{}.csv", self.task));
        let put = |p: &Path, s: &str| {
            std::fs::write(p, s)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))
        };
        put(&json, &self.to_json())?;
        put(&csv, &self.table.to_csv()?)?;
        Ok(vec![json, csv])
    }
}
