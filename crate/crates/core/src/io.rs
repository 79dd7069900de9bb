//! CSV and JSON artifacts. Every file is written to a temporary sibling and
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::combinatorics::ClassCount;
use crate::error::{Error, Result};
use crate::spectral::{Histogram, MomentReport, Spectrum};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    write_atomic(path, &csv_bytes(header, rows)?)
}

/// `index, eigenvalue` with 1-based index.
pub fn write_spectrum_csv(path: &Path, spectrum: &Spectrum) -> Result<()> {
    write_csv(
        path,
        &["index", "eigenvalue"],
        spectrum
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| [(i + 1).to_string(), format_float(v)]),
    )
}

pub fn write_histogram_csv(path: &Path, histogram: &Histogram) -> Result<()> {
    write_csv(
        path,
        &["bin_left", "bin_right", "count", "density"],
        (0..histogram.bins()).map(|i| {
            [
                format_float(histogram.edges[i]),
                format_float(histogram.edges[i + 1]),
                histogram.counts[i].to_string(),
                format_float(histogram.densities[i]),
            ]
        }),
    )
}

pub fn write_moments_csv(path: &Path, report: &MomentReport) -> Result<()> {
    write_csv(
        path,
        &["k", "empirical", "limit", "abs_error"],
        report.rows.iter().map(|r| {
            [
                r.k.to_string(),
                format_float(r.empirical),
                format_float(r.limit),
                format_float(r.abs_error),
            ]
        }),
    )
}

/// One row of `counts.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub k: usize,
    pub n: usize,
    pub class: ClassCount,
    /// `#S_n*(π) / n^{k/2 + 1}`.
    pub ratio_star: f64,
}

pub fn write_counts_csv(path: &Path, rows: &[CountRow]) -> Result<()> {
    write_csv(
        path,
        &["k", "n", "partition_canonical_string", "s_n", "s_n_star", "ratio_star"],
        rows.iter().map(|r| {
            [
                r.k.to_string(),
                r.n.to_string(),
                r.class.partition.to_string(),
                r.class.s_n.to_string(),
                r.class.s_n_star.to_string(),
                format_float(r.ratio_star),
            ]
        }),
    )
}
