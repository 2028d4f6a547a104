//! CSV report rows and two-column plot data, formatted deterministically.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Fail,
    SkippedHypotheses,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::SkippedHypotheses => "skipped:hypotheses",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub scenario: String,
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub status: RowStatus,
    pub grid: String,
    pub runtime_ms: u128,
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        "nan".into()
    }
}

/// Writes `report.csv`. All numeric fields are printed with a fixed format;
/// `runtime_ms` is the only wall-clock-dependent column.
pub fn write_csv(rows: &[Row], path: &Path) -> Result<()> {
    let mut out = String::from("scenario,check,value,bound,margin,pass,grid,runtime_ms\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.scenario,
            row.check,
            fmt(row.value),
            fmt(row.bound),
            fmt(row.margin),
            row.status.as_str(),
            row.grid,
            row.runtime_ms
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Deterministic two-column text file with a comment header. An empty row
/// set produces the header alone.
pub fn emit_plot_data(rows: &[(f64, f64)], header: &str, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "# {header}")?;
    for (a, b) in rows {
        writeln!(w, "{} {}", fmt(*a), fmt(*b))?;
    }
    Ok(())
}
