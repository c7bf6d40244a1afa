use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::Task;
use crate::error::{Error, Result};

/// Recall@K for one configuration and task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub method: String,
    pub params: Map<String, Value>,
    pub sparsity: Option<f64>,
    pub r_m: Option<usize>,
    /// Percentages keyed by K.
    pub recall: BTreeMap<usize, f64>,
    pub queries: usize,
    pub unretrievable: usize,
    #[serde(skip)]
    pub hits: BTreeMap<usize, usize>,
}

impl EvalReport {
    pub(crate) fn from_hits(task: Task, hits: BTreeMap<usize, usize>, queries: usize, unretrievable: usize) -> Self {
        let recall = hits
            .iter()
            .map(|(&k, &h)| {
                let pct = if queries == 0 {
                    0.0
                } else {
                    100.0 * h as f64 / queries as f64
                };
                (k, pct)
            })
            .collect();
        Self {
            task,
            method: String::new(),
            params: Map::new(),
            sparsity: None,
            r_m: None,
            recall,
            queries,
            unretrievable,
            hits,
        }
    }

    pub fn recall_at(&self, k: usize) -> Option<f64> {
        self.recall.get(&k).copied()
    }
}

pub fn write_reports_json(reports: &[EvalReport], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, reports).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_reports_json(path: impl AsRef<Path>) -> Result<Vec<EvalReport>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Serialize)]
struct CsvRow<'a> {
    task: &'static str,
    method: &'a str,
    sparsity: Option<f64>,
    r_m: Option<usize>,
    k: usize,
    recall: f64,
}

/// One row per (report, K): `task,method,sparsity,r_m,k,recall`.
pub fn write_reports_csv(reports: &[EvalReport], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for rep in reports {
        for (&k, &recall) in &rep.recall {
            w.serialize(CsvRow {
                task: rep.task.name(),
                method: &rep.method,
                sparsity: rep.sparsity,
                r_m: rep.r_m,
                k,
                recall,
            })
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
