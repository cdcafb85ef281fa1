//! Side-by-side comparison of runs on one instance.

use crate::error::{HarnessError, Result};
use crate::experiment::{ratio, Summary};
use crate::trace_csv::fmt_float;

pub const REPORT_COLUMNS: [&str; 14] = [
    "instance",
    "algorithm",
    "requests",
    "total_cost",
    "opt_cost",
    "ratio",
    "phases",
    "max_history",
    "p50_ns",
    "p99_ns",
    "q1_p99_ns",
    "q2_p99_ns",
    "q3_p99_ns",
    "q4_p99_ns",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<Summary>,
    pub csv: String,
    pub table: String,
}

/// Aligns summaries of runs on the same instance. An `opt` run, when
/// present, supplies W for every ratio; otherwise each run's own optimum is
/// used.
pub fn compare_report(summaries: &[Summary]) -> Result<Report> {
    let Some(first) = summaries.first() else {
        return Err(HarnessError::Mismatch("no runs to compare".into()));
    };
    for s in summaries {
        if s.instance != first.instance || s.requests != first.requests {
            return Err(HarnessError::Mismatch(format!(
                "{} ran on {} ({} requests), {} on {} ({} requests)",
                first.algorithm, first.instance, first.requests, s.algorithm, s.instance, s.requests
            )));
        }
    }
    let opt = summaries.iter().find(|s| s.algorithm == "opt").map(|s| s.total_cost);
    let rows: Vec<Summary> = summaries
        .iter()
        .map(|s| {
            let mut s = s.clone();
            if let Some(w) = opt.or(s.opt_cost) {
                s.opt_cost = Some(w);
                s.ratio = Some(ratio(s.total_cost, w));
            }
            s
        })
        .collect();

    let cells: Vec<Vec<String>> = rows.iter().map(cells).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS)?;
    for c in &cells {
        w.write_record(c)?;
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8");

    let widths: Vec<usize> = (0..REPORT_COLUMNS.len())
        .map(|i| cells.iter().map(|c| c[i].len()).chain([REPORT_COLUMNS[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |c: &[String]| -> String {
        let padded: Vec<String> = c.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let header: Vec<String> = REPORT_COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut table = line(&header);
    for c in &cells {
        table.push_str(&line(c));
    }
    Ok(Report { rows, csv, table })
}

fn cells(s: &Summary) -> Vec<String> {
    let int = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut c = vec![
        s.instance.clone(),
        s.algorithm.clone(),
        s.requests.to_string(),
        fmt_float(s.total_cost),
        s.opt_cost.map(fmt_float).unwrap_or_default(),
        s.ratio.map(fmt_float).unwrap_or_default(),
        s.phases.to_string(),
        s.max_history.to_string(),
        int(s.p50_ns),
        int(s.p99_ns),
    ];
    c.extend(s.quarter_p99_ns.iter().map(|&q| int(q)));
    c
}
