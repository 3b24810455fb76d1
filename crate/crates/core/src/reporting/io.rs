//! File formats: JSON Lines histories, summary and comparison CSVs and a
//! plain-text comparison table.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! results always produce equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::reporting::stats::{ComparisonReport, SummaryStats};
use crate::tuner::{HistoryEntry, RunResult};

pub const SUMMARY_HEADER: &str = "method,runs,N,median,mean,std,min,max,pruned_fraction,empty_runs";
pub const COMPARISON_HEADER: &str = "statistic,bo,rs,grad,bo_minus_rs";

/// One `HistoryEntry` per line, in evaluation order.
pub fn history_jsonl(run: &RunResult) -> Result<String> {
    let mut out = String::new();
    for e in &run.all_entries {
        out.push_str(&serde_json::to_string(e)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_history(path: &Path, run: &RunResult) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for e in &run.all_entries {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_history(path: &Path) -> Result<Vec<HistoryEntry>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: HistoryEntry = serde_json::from_str(&line)
            .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        entries.push(entry);
    }
    Ok(entries)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(stats: &[&SummaryStats]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.method,
            s.runs,
            s.iterations,
            opt(s.median),
            opt(s.mean),
            opt(s.std),
            opt(s.min),
            opt(s.max),
            s.pruned_fraction,
            s.empty_runs
        );
    }
    out
}

fn comparison_rows(r: &ComparisonReport) -> Vec<(&'static str, [String; 4])> {
    let g = |f: fn(&SummaryStats) -> Option<f64>| r.grad.as_ref().and_then(f);
    let row = |f: fn(&SummaryStats) -> Option<f64>, d: Option<f64>| {
        [opt(f(&r.bo)), opt(f(&r.rs)), opt(g(f)), opt(d)]
    };
    let count = |f: fn(&SummaryStats) -> f64| {
        [
            f(&r.bo).to_string(),
            f(&r.rs).to_string(),
            r.grad
                .as_ref()
                .map(|s| f(s).to_string())
                .unwrap_or_default(),
            String::new(),
        ]
    };
    vec![
        ("median", row(|s| s.median, r.median_delta)),
        ("mean", row(|s| s.mean, r.mean_delta)),
        ("std", row(|s| s.std, r.std_delta)),
        ("min", row(|s| s.min, None)),
        ("max", row(|s| s.max, None)),
        ("pruned_fraction", count(|s| s.pruned_fraction)),
        ("empty_runs", count(|s| s.empty_runs as f64)),
    ]
}

pub fn comparison_csv(r: &ComparisonReport) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for (name, cells) in comparison_rows(r) {
        let _ = writeln!(out, "{name},{}", cells.join(","));
    }
    out
}

pub fn comparison_table(r: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", r.seed_protocol);
    let _ = writeln!(
        out,
        "# runs = {}, evaluations per run = {}",
        r.bo.runs, r.bo.iterations
    );
    let cell = |s: &str| {
        if s.is_empty() {
            "-".to_string()
        } else {
            s.to_string()
        }
    };
    let _ = writeln!(
        out,
        "{:<16} {:>22} {:>22} {:>22} {:>22}",
        "statistic", "bo", "rs", "grad", "bo - rs"
    );
    for (name, cells) in comparison_rows(r) {
        let _ = writeln!(
            out,
            "{:<16} {:>22} {:>22} {:>22} {:>22}",
            name,
            cell(&cells[0]),
            cell(&cells[1]),
            cell(&cells[2]),
            cell(&cells[3])
        );
    }
    out
}
