//! Line-oriented UTF-8 reports.
//!
//! ```text
//! # <title>
//! [config]
//! key = value
//! [results]
//! key = value
//! [table]
//! col_a col_b ...        (first row is the header, columns tab separated)
//! ```

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use super::{create, open};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub config: Vec<(String, String)>,
    pub results: Vec<(String, String)>,
    pub table: Vec<Vec<String>>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn config(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.config.push((key.into(), value.to_string()));
        self
    }

    pub fn result(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.results.push((key.into(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.table.push(cells);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.results
            .iter()
            .chain(&self.config)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut report = Report::default();
        let mut section = "";
        for (i, line) in text.lines().enumerate() {
            if let Some(t) = line.strip_prefix("# ") {
                if i == 0 {
                    report.title = t.to_string();
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = match &line[1..line.len() - 1] {
                    "config" => "config",
                    "results" => "results",
                    "table" => "table",
                    other => return Err(Error::CorruptFile(format!("report: unknown section {other:?}"))),
                };
                continue;
            }
            if section == "table" {
                report.table.push(line.split('\t').map(str::to_string).collect());
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::CorruptFile(format!("report: line {} is not `key = value`", i + 1)))?;
            let entry = (k.trim().to_string(), v.trim().to_string());
            match section {
                "config" => report.config.push(entry),
                "results" => report.results.push(entry),
                _ => return Err(Error::CorruptFile(format!("report: entry outside a section on line {}", i + 1))),
            }
        }
        Ok(report)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = create(path.as_ref())?;
        write!(w, "{self}")?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let mut text = String::new();
        open(path.as_ref())?.read_to_string(&mut text)?;
        Self::parse(&text)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.title)?;
        writeln!(f, "[config]")?;
        for (k, v) in &self.config {
            writeln!(f, "{k} = {v}")?;
        }
        writeln!(f, "[results]")?;
        for (k, v) in &self.results {
            writeln!(f, "{k} = {v}")?;
        }
        if !self.table.is_empty() {
            writeln!(f, "[table]")?;
            for row in &self.table {
                writeln!(f, "{}", row.join("\t"))?;
            }
        }
        Ok(())
    }
}
