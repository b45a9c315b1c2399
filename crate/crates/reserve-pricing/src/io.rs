//! Dataset CSV and bid-list files.
//!
//! The dataset schema is a header `f0,f1,...,f{d-1},bid` followed by one
//! sample per line, decimal-point reals, UTF-8, no quoting. Floats are
//! written in shortest round-trip form so write-then-load is lossless.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Dataset, Sample};

fn csv_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

/// Parse a dataset from CSV text; `path` is used in error messages only.
pub fn parse_csv(text: &str, path: &Path) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| csv_err(path, 1, "missing header"))?;
    let columns: Vec<&str> = header.trim_end().split(',').collect();
    let d = columns.len() - 1;
    if columns.last() != Some(&"bid") {
        return Err(csv_err(
            path,
            1,
            format!(
                "last column must be `bid`, got `{}`",
                columns.last().unwrap_or(&"")
            ),
        ));
    }
    for (i, col) in columns[..d].iter().enumerate() {
        if *col != format!("f{i}") {
            return Err(csv_err(
                path,
                1,
                format!("feature column {} must be `f{i}`, got `{col}`", i + 1),
            ));
        }
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(csv_err(
                path,
                line_no,
                format!("expected {} fields, got {}", d + 1, fields.len()),
            ));
        }
        let mut values = Vec::with_capacity(d + 1);
        for f in &fields {
            values.push(f.trim().parse::<f64>().map_err(|e| {
                csv_err(path, line_no, format!("bad number `{f}`: {e}"))
            })?);
        }
        let bid = values.pop().unwrap();
        if !bid.is_finite() || bid < 0.0 {
            return Err(csv_err(
                path,
                line_no,
                format!("bid must be finite and >= 0, got {bid}"),
            ));
        }
        samples.push(Sample::new(values, bid));
    }
    if samples.is_empty() {
        return Err(csv_err(path, 1, "no data rows"));
    }
    Dataset::new(samples).map_err(|e| match e {
        Error::DimensionMismatch { expected, actual } => csv_err(
            path,
            1,
            format!("inconsistent row width: expected {expected}, got {actual}"),
        ),
        other => other,
    })
}

/// Load a dataset CSV from disk.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_csv(&text, path)
}

/// Render a dataset to CSV text.
pub fn render_csv(dataset: &Dataset) -> String {
    let d = dataset.dimension();
    let mut out = String::new();
    for i in 0..d {
        out.push_str(&format!("f{i},"));
    }
    out.push_str("bid\n");
    for s in dataset.samples() {
        for f in &s.features {
            out.push_str(&format!("{f},"));
        }
        out.push_str(&format!("{}\n", s.bid));
    }
    out
}

/// Write a dataset CSV to disk.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_csv(dataset)).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Load a plain bid list, one non-negative real per line; blank lines are
/// skipped.
pub fn load_bids(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut bids = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bid: f64 = line
            .parse()
            .map_err(|e| csv_err(path, idx + 1, format!("bad number `{line}`: {e}")))?;
        if !bid.is_finite() || bid < 0.0 {
            return Err(csv_err(path, idx + 1, "bid must be finite and >= 0"));
        }
        bids.push(bid);
    }
    if bids.is_empty() {
        return Err(csv_err(path, 1, "no bids"));
    }
    Ok(bids)
}

/// Write arbitrary text, mapping failures to an error carrying the path.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Read text, mapping failures to an error carrying the path.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}
