//! Results CSV: one row per (method, sweep value).

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "method,sweep_param,sweep_value,trials,failures,emp_variance,rmse,ci95_low,ci95_high,theoretical_variance";

/// Aggregated Monte-Carlo results for one method at one sweep value.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialStats {
    pub method: String,
    pub sweep_param: String,
    pub sweep_value: f64,
    pub trials: usize,
    pub failures: usize,
    /// Variance of the released estimates about their own mean.
    pub emp_variance: f64,
    /// Root mean squared error about the reference statistic.
    pub rmse: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub theoretical_variance: Option<f64>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn sort_rows(rows: &mut [TrialStats]) {
    rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.sweep_value.total_cmp(&b.sweep_value))
    });
}

/// Renders rows as CSV, sorted by `(method, sweep_value)`.
pub fn to_csv(rows: &[TrialStats]) -> String {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.sweep_param,
            format_float(r.sweep_value),
            r.trials,
            r.failures,
            format_float(r.emp_variance),
            format_float(r.rmse),
            format_float(r.ci95_low),
            format_float(r.ci95_high),
            r.theoretical_variance.map(format_float).unwrap_or_default(),
        );
    }
    out
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Results {
        line,
        message: message.into(),
    }
}

/// Parses a results CSV produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<TrialStats>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == CSV_HEADER => {}
        _ => return Err(bad(1, "missing or unexpected header")),
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(bad(line_no, format!("expected 10 fields, found {}", fields.len())));
        }
        let float = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| bad(line_no, format!("field {} is not a number: {:?}", i + 1, fields[i])))
        };
        let count = |i: usize| -> Result<usize> {
            fields[i]
                .parse::<usize>()
                .map_err(|_| bad(line_no, format!("field {} is not a count: {:?}", i + 1, fields[i])))
        };
        if fields[0].is_empty() {
            return Err(bad(line_no, "empty method"));
        }
        let row = TrialStats {
            method: fields[0].to_string(),
            sweep_param: fields[1].to_string(),
            sweep_value: float(2)?,
            trials: count(3)?,
            failures: count(4)?,
            emp_variance: float(5)?,
            rmse: float(6)?,
            ci95_low: float(7)?,
            ci95_high: float(8)?,
            theoretical_variance: if fields[9].is_empty() { None } else { Some(float(9)?) },
        };
        if row.failures > row.trials {
            return Err(bad(line_no, "failures exceed trials"));
        }
        rows.push(row);
    }
    Ok(rows)
}
