//! Summary statistics over run records.

use std::fmt;

use crate::run::RunRecord;
use crate::BenchError;

/// Linear-interpolation quantile of ascending `sorted` (`h = (n - 1) q`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Planning-time distribution of the successful runs, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStats {
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub successes: usize,
    /// `None` when no run succeeded.
    pub planning: Option<TimeStats>,
    pub mean_simplify_ms: Option<f64>,
}

impl Summary {
    pub fn success_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.successes as f64 / self.runs as f64
        }
    }
}

fn ms(ns: u64) -> f64 {
    ns as f64 / 1e6
}

pub fn summarize_stats(records: &[RunRecord]) -> Result<Summary, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyRecords);
    }
    let solved: Vec<&RunRecord> = records.iter().filter(|r| r.success).collect();
    let mut times: Vec<f64> = solved.iter().map(|r| ms(r.planning_ns)).collect();
    times.sort_by(f64::total_cmp);
    let planning = (!times.is_empty()).then(|| TimeStats {
        mean: times.iter().sum::<f64>() / times.len() as f64,
        q1: quantile(&times, 0.25),
        median: quantile(&times, 0.5),
        q3: quantile(&times, 0.75),
        p95: quantile(&times, 0.95),
    });
    let mean_simplify_ms = (!solved.is_empty())
        .then(|| solved.iter().map(|r| ms(r.simplify_ns)).sum::<f64>() / solved.len() as f64);
    Ok(Summary {
        runs: records.len(),
        successes: solved.len(),
        planning,
        mean_simplify_ms,
    })
}

/// One summary line in the column order
/// `Mean | Q1 | Median | Q3 | 95% | Mean Simpl. | Succ.`, times in
/// milliseconds with two decimals, `-` for absent values.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub cells: [String; 7],
}

pub const TABLE_HEADER: [&str; 7] = ["Mean", "Q1", "Median", "Q3", "95%", "Mean Simpl.", "Succ."];

fn fmt_ms(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

fn fmt_rate(rate: f64) -> String {
    let pct = rate * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{pct:.0}%")
    } else {
        format!("{pct:.1}%")
    }
}

impl From<&Summary> for TableRow {
    fn from(s: &Summary) -> Self {
        let p = s.planning;
        TableRow {
            cells: [
                fmt_ms(p.map(|t| t.mean)),
                fmt_ms(p.map(|t| t.q1)),
                fmt_ms(p.map(|t| t.median)),
                fmt_ms(p.map(|t| t.q3)),
                fmt_ms(p.map(|t| t.p95)),
                fmt_ms(s.mean_simplify_ms),
                fmt_rate(s.success_rate()),
            ],
        }
    }
}

impl TableRow {
    /// Parses `a | b | ... | g`, normalizing each cell through the same
    /// formatter.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let bad = || BenchError::TableRow(text.to_string());
        let parts: Vec<&str> = text.split('|').map(str::trim).collect();
        if parts.len() != 7 {
            return Err(bad());
        }
        let mut cells: [String; 7] = Default::default();
        for (i, part) in parts.iter().enumerate().take(6) {
            cells[i] = match *part {
                "-" => "-".to_string(),
                v => fmt_ms(Some(v.parse::<f64>().map_err(|_| bad())?)),
            };
        }
        let rate = parts[6]
            .strip_suffix('%')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?;
        cells[6] = fmt_rate(rate / 100.0);
        Ok(TableRow { cells })
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cells.join(" | "))
    }
}
