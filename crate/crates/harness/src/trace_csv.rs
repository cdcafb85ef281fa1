//! CSV traces: `# key=value` metadata lines, then a one-line header and one
//! row per request. Floats carry nine significant digits.

use std::fmt::Display;
use std::io::{BufRead, Write};
use std::str::FromStr;

use boundedwfa_core::{RunTrace, StepRecord};

use crate::error::{HarnessError, Result};

pub const COLUMNS: [&str; 12] = [
    "step",
    "request",
    "phase",
    "state",
    "step_cost",
    "cumulative_cost",
    "covered",
    "D",
    "threshold",
    "restarted",
    "elapsed_ns",
    "moved_from",
];

/// Run metadata written ahead of the header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceMeta {
    /// Fingerprint of the instance document.
    pub instance: String,
    pub algorithm: String,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
}

/// A trace together with its metadata and request labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile<S> {
    pub meta: TraceMeta,
    pub requests: Vec<String>,
    pub trace: RunTrace<f64, S>,
}

/// `%.9g`: nine significant digits, trailing zeros trimmed, exponent form
/// outside [1e-4, 1e9).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_float(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_trace<S: Display>(
    mut out: impl Write,
    meta: &TraceMeta,
    requests: &[String],
    trace: &RunTrace<f64, S>,
) -> Result<()> {
    writeln!(out, "# instance={}", meta.instance)?;
    writeln!(out, "# algorithm={}", meta.algorithm)?;
    writeln!(out, "# alpha={}", opt_float(meta.alpha))?;
    writeln!(out, "# epsilon={}", opt_float(meta.epsilon))?;
    writeln!(out, "# delta={}", opt_float(meta.delta))?;
    writeln!(out, "# seed={}", meta.seed.map(|s| s.to_string()).unwrap_or_default())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for (row, request) in trace.rows.iter().zip(requests) {
        w.write_record([
            row.step.to_string(),
            request.clone(),
            row.phase.to_string(),
            row.state.to_string(),
            fmt_float(row.step_cost),
            fmt_float(row.cumulative_cost),
            u8::from(row.covered).to_string(),
            opt_float(row.interest_bound),
            // No threshold means no restart can ever fire.
            fmt_float(row.threshold.unwrap_or(f64::INFINITY)),
            u8::from(row.restarted).to_string(),
            row.elapsed_ns.to_string(),
            row.moved_from.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<S: FromStr>(mut input: impl BufRead) -> Result<TraceFile<S>> {
    let mut meta = TraceMeta::default();
    let mut line = String::new();
    let mut header = None;
    let mut line_no = 0;
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let Some(rest) = line.strip_prefix('#') else {
            header = Some(line.trim_end().to_string());
            break;
        };
        let (key, value) = rest
            .trim()
            .split_once('=')
            .ok_or_else(|| HarnessError::Trace(format!("line {line_no}: metadata needs key=value")))?;
        let float = |v: &str| -> Result<Option<f64>> {
            if v.is_empty() {
                return Ok(None);
            }
            parse_float(v).map(Some).ok_or_else(|| HarnessError::Trace(format!("line {line_no}: bad number {v:?}")))
        };
        match key {
            "instance" => meta.instance = value.to_string(),
            "algorithm" => meta.algorithm = value.to_string(),
            "alpha" => meta.alpha = float(value)?,
            "epsilon" => meta.epsilon = float(value)?,
            "delta" => meta.delta = float(value)?,
            "seed" if value.is_empty() => meta.seed = None,
            "seed" => {
                meta.seed = Some(value.parse().map_err(|_| HarnessError::Trace(format!("line {line_no}: bad seed")))?)
            }
            _ => {}
        }
    }
    let header = header.ok_or_else(|| HarnessError::Trace("missing header".into()))?;
    if header != COLUMNS.join(",") {
        return Err(HarnessError::Trace(format!("line {line_no}: unexpected header {header:?}")));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut requests = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let at = line_no + i + 1;
        let field = |c: usize| record.get(c).unwrap_or("");
        let bad = |c: usize| HarnessError::Trace(format!("line {at}: bad {} {:?}", COLUMNS[c], field(c)));
        let int = |c: usize| field(c).parse::<usize>().map_err(|_| bad(c));
        let float = |c: usize| parse_float(field(c)).ok_or_else(|| bad(c));
        let flag = |c: usize| match field(c) {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(bad(c)),
        };
        if record.len() != COLUMNS.len() {
            return Err(HarnessError::Trace(format!("line {at}: expected {} fields, got {}", COLUMNS.len(), record.len())));
        }
        let threshold = float(8)?;
        rows.push(StepRecord {
            step: int(0)?,
            phase: int(2)?,
            state: field(3).parse::<S>().map_err(|_| bad(3))?,
            step_cost: float(4)?,
            cumulative_cost: float(5)?,
            covered: flag(6)?,
            interest_bound: if field(7).is_empty() { None } else { Some(float(7)?) },
            threshold: threshold.is_finite().then_some(threshold),
            restarted: flag(9)?,
            elapsed_ns: field(10).parse().map_err(|_| bad(10))?,
            moved_from: if field(11).is_empty() { None } else { Some(int(11)?) },
        });
        requests.push(field(1).to_string());
    }
    Ok(TraceFile { meta, requests, trace: RunTrace { rows } })
}
