//! CSV tables and the JSON report written by every run.

use std::path::{Path, PathBuf};

use serde_json::Value;

/// Missing cells are written empty.
pub type Cell = Option<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    /// `t,energy,bound_lower,bound_upper`.
    pub fn decay() -> Self {
        Self::new(&["t", "energy", "bound_lower", "bound_upper"])
    }

    /// `rho,value`.
    pub fn probe() -> Self {
        Self::new(&["rho", "value"])
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push(row.iter().copied().map(Some).collect());
    }
}

/// One labelled table; multi-case runs emit several sharing a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub label: String,
    pub table: Table,
}

fn cell(c: Cell) -> String {
    c.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes one table as CSV. With several traces a leading `case` column
/// carries the label.
pub fn write_traces(path: &Path, traces: &[Trace]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let multi = traces.len() > 1;
    let header = traces.first().map(|t| t.table.header.clone()).unwrap_or_else(|| Table::probe().header);
    let mut head: Vec<&str> = Vec::with_capacity(header.len() + 1);
    if multi {
        head.push("case");
    }
    head.extend(header.iter().copied());
    w.write_record(&head)?;
    for tr in traces {
        for row in &tr.table.rows {
            let mut rec: Vec<String> = Vec::with_capacity(row.len() + 1);
            if multi {
                rec.push(tr.label.clone());
            }
            rec.extend(row.iter().copied().map(cell));
            w.write_record(&rec)?;
        }
    }
    w.flush()
}

pub fn write_table(path: &Path, table: &Table) -> std::io::Result<()> {
    write_traces(
        path,
        &[Trace {
            label: String::new(),
            table: table.clone(),
        }],
    )
}

pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// Paths written by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub report: PathBuf,
    pub trace: PathBuf,
}
