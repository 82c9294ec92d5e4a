//! Plain-text file formats.
//!
//! Matrices are comma-separated with no header, one matrix row per line, so
//! a data file has one line per feature and one column per sample. Numbers
//! are written with Rust's shortest round-trip formatting and read back
//! bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gnmf_core::solver::ConvergenceTrace;
use gnmf_core::DenseMatrix;

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "iter,objective,rel_change,beta,accepted,c_k,d_k,elapsed_s";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Loads a data matrix. Negative entries are rejected.
pub fn load_csv_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_csv_matrix(&read_text(path)?, path, false)
}

/// Loads a matrix that may hold negative values, such as an adjacency.
pub fn load_csv_table(path: &Path) -> Result<DenseMatrix> {
    parse_csv_matrix(&read_text(path)?, path, true)
}

/// Parses CSV text. `origin` only labels error messages. Blank lines are
/// skipped; line numbers in errors are 1-based and count them.
pub fn parse_csv_matrix(text: &str, origin: &Path, allow_negative: bool) -> Result<DenseMatrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for (c, cell) in line.split(',').enumerate() {
            let cell = cell.trim();
            let v: f64 = cell.parse().map_err(|_| {
                Error::parse(
                    origin,
                    line_no,
                    format!("column {}: not a number: {cell:?}", c + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("column {}: non-finite value", c + 1),
                ));
            }
            if v < 0.0 && !allow_negative {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("column {}: negative entry {v} in data matrix", c + 1),
                ));
            }
            data.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(expected) if expected != count => {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected {expected} columns, found {count}"),
                ));
            }
            Some(_) => {}
        }
        rows += 1;
    }
    let Some(cols) = cols else {
        return Err(Error::parse(origin, 1, "empty matrix file"));
    };
    Ok(DenseMatrix::new(rows, cols, data)?)
}

pub fn format_csv_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_csv_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_text(path, &format_csv_matrix(m))
}

/// One nonnegative integer label per line.
pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let label = line.parse().map_err(|_| {
            Error::parse(
                path,
                idx + 1,
                format!("not a nonnegative integer label: {line:?}"),
            )
        })?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::parse(path, 1, "empty label file"));
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels {
        writeln!(out, "{l}").unwrap();
    }
    write_text(path, &out)
}

pub fn format_trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.iter, r.objective, r.rel_change, r.beta, r.accepted, r.c_k, r.d_k, r.elapsed_s
        )
        .unwrap();
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    write_text(path, &format_trace_csv(trace))
}

pub fn write_trace_json(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    write_text(path, &serde_json::to_string_pretty(trace)?)
}

/// Reads `(iter, objective)` pairs back from a trace CSV.
pub fn load_trace_points(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = read_text(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let header_ok = lines.next().is_some_and(|(_, h)| h.trim() == TRACE_HEADER);
    if !header_ok {
        return Err(Error::parse(
            path,
            1,
            format!("expected header {TRACE_HEADER:?}"),
        ));
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        let mut cells = line.split(',').map(str::trim);
        let iter = cells.next().and_then(|c| c.parse().ok());
        let objective = cells.next().and_then(|c| c.parse().ok());
        match (iter, objective) {
            (Some(i), Some(f)) => points.push((i, f)),
            _ => return Err(Error::parse(path, idx + 1, "malformed trace row")),
        }
    }
    Ok(points)
}

pub fn format_plot_points(points: &[(usize, f64)]) -> String {
    let mut out = String::from("iteration,objective\n");
    for (i, f) in points {
        writeln!(out, "{i},{f}").unwrap();
    }
    out
}
