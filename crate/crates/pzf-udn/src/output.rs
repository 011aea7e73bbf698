//! CSV and JSON rendering. Numbers use `.` as decimal separator regardless of
//! locale; probabilities carry six significant digits in CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, Result};
use crate::sweep::{OptimalRow, SweepRow};

/// `x` with `digits` significant digits, in fixed notation for moderate
/// magnitudes and scientific notation otherwise.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.prec$e}", prec = digits - 1);
    // exponent after rounding, so 9.9999996 counts as 1.00000e1
    let exponent: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_sig(v: Option<f64>) -> String {
    v.map(|v| significant(v, 6)).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let timing = rows.iter().any(|r| r.wall_time_s.is_some());
    let mut out = String::from(
        "lambda,alpha,rho0,rho,r0,n_r,m,theta,method,status,probability,half_width,trials,seed,sampler,window_points,confidence",
    );
    if timing {
        out.push_str(",wall_time_s");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.lambda,
            r.alpha,
            r.rho0,
            r.rho,
            r.r0,
            r.n_r,
            r.m,
            r.theta,
            r.method,
            r.status,
            opt_sig(r.probability),
            opt_sig(r.half_width),
            opt(r.trials),
            opt(r.seed),
            opt(r.sampler),
            opt(r.window_points),
            opt(r.confidence),
        );
        if timing {
            let _ = write!(out, ",{}", opt(r.wall_time_s.map(|t| format!("{t:.3}"))));
        }
        out.push('\n');
    }
    out
}

pub fn optimal_csv(rows: &[OptimalRow]) -> String {
    let timing = rows.iter().any(|r| r.wall_time_s.is_some());
    let mut out = String::from("lambda,alpha,rho0,rho,r0,theta,n_r,m_star,probability,half_n_r");
    if timing {
        out.push_str(",wall_time_s");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.lambda,
            r.alpha,
            r.rho0,
            r.rho,
            r.r0,
            r.theta,
            r.n_r,
            r.m_star,
            significant(r.probability, 6),
            r.half_n_r
        );
        if timing {
            let _ = write!(out, ",{}", opt(r.wall_time_s.map(|t| format!("{t:.3}"))));
        }
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(sweep_csv(rows)),
        Format::Json => json(rows),
    }
}

pub fn render_optimal(rows: &[OptimalRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(optimal_csv(rows)),
        Format::Json => json(rows),
    }
}
