//! JSON envelopes and CSV projections.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Rows of a CSV projection, header first.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A finished command: the JSON document, its CSV projection and whether
/// every verdict passed.
pub struct Outcome {
    pub json: String,
    pub table: Table,
    pub passed: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a RunConfig,
    passed: bool,
    report: &'a T,
}

impl Outcome {
    pub fn new<T: Serialize>(
        config: &RunConfig,
        passed: bool,
        report: &T,
        table: Table,
    ) -> Result<Self> {
        let env = Envelope {
            config,
            passed,
            report,
        };
        let mut json = serde_json::to_string_pretty(&env)?;
        json.push('\n');
        Ok(Self {
            json,
            table,
            passed,
        })
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => Ok(self.json.clone().into_bytes()),
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                w.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                Ok(w.into_inner().context("flushing CSV")?)
            }
        }
    }

    pub fn emit(&self, format: Format, output: Option<&Path>) -> Result<()> {
        let bytes = self.render(format)?;
        match output {
            Some(path) => {
                std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)?;
                Ok(out.flush()?)
            }
        }
    }
}

/// Fixed three decimals, or `digits` significant digits in scientific form.
pub fn fmt_value(v: f64, digits: Option<usize>) -> String {
    match digits {
        None => {
            let s = format!("{v:.3}");
            if s == "-0.000" {
                "0.000".into()
            } else {
                s
            }
        }
        Some(d) => format!("{v:.*e}", d.saturating_sub(1)),
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
