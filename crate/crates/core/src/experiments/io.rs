//! JSON-lines reports and CSV summaries.

use std::path::Path;

use crate::csv_io::{format_f64, write_atomic};
use crate::error::{Error, Result};
use crate::experiments::runner::{CellSummary, TrialReport};

pub const SUMMARY_HEADER: &str = "n,delta,q50_max,q50_mse,p_within_envelope,p_A_hat,ci_lo,ci_hi";

pub fn reports_to_jsonl(reports: &[TrialReport]) -> Result<String> {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_reports_jsonl(text: &str) -> Result<Vec<TrialReport>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("report line {}: {e}", i + 1))))
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

pub fn summaries_to_csv(summaries: &[CellSummary]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.n,
            format_f64(s.delta),
            format_f64(s.q50_max),
            format_f64(s.q50_mse),
            format_f64(s.p_within_envelope),
            opt(s.p_a_hat),
            opt(s.ci.map(|c| c.0)),
            opt(s.ci.map(|c| c.1)),
        ));
    }
    out
}

/// One row of a summary CSV as read back.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub delta: f64,
    pub q50_max: f64,
    pub q50_mse: f64,
    pub p_within_envelope: Option<f64>,
    pub p_a_hat: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == SUMMARY_HEADER => {}
        _ => {
            return Err(Error::Parse(format!(
                "summary CSV must start with the header '{SUMMARY_HEADER}'"
            )))
        }
    }
    lines
        .map(|(i, line)| {
            let err = |what: &str| Error::Parse(format!("summary line {}: {what}", i + 1));
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 8 {
                return Err(err(&format!("expected 8 fields, got {}", fields.len())));
            }
            let num = |k: usize| {
                fields[k]
                    .parse::<f64>()
                    .map_err(|_| err(&format!("bad number '{}'", fields[k])))
            };
            let maybe = |k: usize| {
                if fields[k].is_empty() {
                    Ok(None)
                } else {
                    num(k).map(Some)
                }
            };
            Ok(SummaryRow {
                n: fields[0]
                    .parse()
                    .map_err(|_| err(&format!("bad sample count '{}'", fields[0])))?,
                delta: num(1)?,
                q50_max: num(2)?,
                q50_mse: num(3)?,
                p_within_envelope: maybe(4)?,
                p_a_hat: maybe(5)?,
                ci_lo: maybe(6)?,
                ci_hi: maybe(7)?,
            })
        })
        .collect()
}

pub fn write_reports(path: &Path, reports: &[TrialReport]) -> Result<()> {
    write_atomic(path, reports_to_jsonl(reports)?.as_bytes())
}

pub fn write_summaries(path: &Path, summaries: &[CellSummary]) -> Result<()> {
    write_atomic(path, summaries_to_csv(summaries).as_bytes())
}
