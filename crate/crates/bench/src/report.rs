//! CSV and plain-text reports.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Mode, Workload};
use crate::{BenchError, BenchResult};

/// One CSV row. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub mode: String,
    pub workload: String,
    pub n_calls: usize,
    pub mean_s: f64,
    pub p50_s: f64,
    pub p99_s: f64,
    pub cps: f64,
    /// `mean(direct) / mean(this row)` for the same workload; empty when no
    /// direct row exists.
    pub speedup_vs_direct: Option<f64>,
}

impl ReportRow {
    pub fn from_result(r: &BenchResult) -> Self {
        Self {
            mode: r.mode.to_string(),
            workload: r.workload.to_string(),
            n_calls: r.stats.n_calls,
            mean_s: r.stats.mean,
            p50_s: r.stats.p50,
            p99_s: r.stats.p99,
            cps: r.stats.calls_per_second,
            speedup_vs_direct: None,
        }
    }

    pub fn mode(&self) -> Result<Mode, BenchError> {
        self.mode.parse()
    }

    pub fn workload(&self) -> Result<Workload, BenchError> {
        self.workload.parse()
    }
}

/// Recomputes every row's `speedup_vs_direct`.
pub fn fill_speedups(rows: &mut [ReportRow]) {
    let direct: HashMap<String, f64> = rows
        .iter()
        .filter(|r| r.mode == Mode::Direct.to_string())
        .map(|r| (r.workload.clone(), r.mean_s))
        .collect();
    for row in rows.iter_mut() {
        row.speedup_vs_direct = direct.get(&row.workload).map(|d| d / row.mean_s);
    }
}

/// Rows for a set of results, with speedups filled in.
pub fn rows_for(results: &[BenchResult]) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = results.iter().map(ReportRow::from_result).collect();
    fill_speedups(&mut rows);
    rows
}

/// Replaces rows with the same mode and workload, appends the rest, and
/// recomputes speedups.
pub fn merge_rows(existing: Vec<ReportRow>, new: Vec<ReportRow>) -> Vec<ReportRow> {
    let mut rows = existing;
    for n in new {
        match rows
            .iter_mut()
            .find(|r| r.mode == n.mode && r.workload == n.workload)
        {
            Some(slot) => *slot = n,
            None => rows.push(n),
        }
    }
    fill_speedups(&mut rows);
    rows
}

pub fn write_csv(rows: &[ReportRow], out: impl io::Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "mode",
            "workload",
            "n_calls",
            "mean_s",
            "p50_s",
            "p99_s",
            "cps",
            "speedup_vs_direct",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl io::Read) -> Result<Vec<ReportRow>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<ReportRow>, _>>()?;
    for row in &rows {
        row.mode()?;
        row.workload()?;
    }
    Ok(rows)
}

/// Merges `new` into the CSV at `path`, creating it if needed, and returns
/// the rows written.
pub fn update_csv_file(path: &Path, new: Vec<ReportRow>) -> Result<Vec<ReportRow>, BenchError> {
    let existing = match std::fs::File::open(path) {
        Ok(f) => read_csv(f)?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let rows = merge_rows(existing, new);
    write_csv(&rows, std::fs::File::create(path)?)?;
    Ok(rows)
}

fn format_seconds(s: f64) -> String {
    if s < 1e-3 {
        format!("{:.2} µs", s * 1e6)
    } else if s < 1.0 {
        format!("{:.3} ms", s * 1e3)
    } else {
        format!("{s:.3} s")
    }
}

/// Fixed-width table, one line per row.
pub fn render_table(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:<11} {:>8} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "mode", "workload", "calls", "mean", "p50", "p99", "calls/s", "speedup"
    );
    for r in rows {
        let workload = if r.workload == Workload::Episode.as_str() {
            format!("{}*", r.workload)
        } else {
            r.workload.clone()
        };
        let speedup = r
            .speedup_vs_direct
            .map_or_else(|| "-".to_owned(), |s| format!("{s:.3e}"));
        let _ = writeln!(
            out,
            "{:<20} {:<11} {:>8} {:>12} {:>12} {:>12} {:>12.1} {:>12}",
            r.mode,
            workload,
            r.n_calls,
            format_seconds(r.mean_s),
            format_seconds(r.p50_s),
            format_seconds(r.p99_s),
            r.cps,
            speedup
        );
    }
    if rows.iter().any(|r| r.workload == Workload::Episode.as_str()) {
        out.push_str(
            "* synthetic control loop: capture RGB and depth, set joint velocities, step, read tip\n",
        );
    }
    out
}
