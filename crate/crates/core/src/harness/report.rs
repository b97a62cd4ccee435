//! CSV output. Floats use Rust's shortest round-trip formatting, so files
//! are exact and byte-stable for identical inputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::ExperimentReport;
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str =
    "sweep_param,sweep_value,system,solver,clustering,mean_sum_rate_bps,trials,mean_iterations,mean_changes";
pub const CDF_HEADER: &str = "system,solver,clustering,n_users,rate_bps,cdf";

pub fn write_sweep_csv<W: Write>(report: &ExperimentReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.sweep_param,
            row.sweep_value,
            row.series.system.name(),
            row.series.solver_label(),
            row.series.clustering.name(),
            row.mean_sum_rate,
            row.trials(),
            row.mean_iterations,
            row.mean_changes
        )?;
    }
    out.flush()
}

pub fn write_cdf_csv<W: Write>(report: &ExperimentReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CDF_HEADER}")?;
    for curve in &report.cdfs {
        for (rate, frac) in &curve.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                curve.series.system.name(),
                curve.series.solver_label(),
                curve.series.clustering.name(),
                curve.n_users,
                rate,
                frac
            )?;
        }
    }
    out.flush()
}

/// `results.csv` → `results_cdf.csv`.
pub fn cdf_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_cdf.{}", ext.to_string_lossy()),
        None => format!("{stem}_cdf"),
    };
    path.with_file_name(name)
}

fn write_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    f(BufWriter::new(file)).map_err(io_err)
}

/// Writes the sweep CSV to `path` and, when the report carries CDFs, the CDF
/// CSV next to it. Returns the paths written.
pub fn write_report(report: &ExperimentReport, path: &Path) -> Result<Vec<PathBuf>> {
    write_file(path, |w| write_sweep_csv(report, w))?;
    let mut written = vec![path.to_path_buf()];
    if !report.cdfs.is_empty() {
        let cdf = cdf_path(path);
        write_file(&cdf, |w| write_cdf_csv(report, w))?;
        written.push(cdf);
    }
    Ok(written)
}
