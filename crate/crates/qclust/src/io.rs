//! CSV loading, scenario and grid export, and the run report.
//!
//! Loaders return a [`Loaded`] bundle so callers can surface what was
//! dropped or imputed alongside the numeric table. Writers keep a stable,
//! documented layout: reports are JSON with a fixed key order, grids and
//! scenario exports are plain CSV whose floats round-trip exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::clustering::Detection;
use crate::datagen::Scenario;
use crate::error::{QcError, Result};
use crate::potential::{Dataset, PotentialGrid, PotentialMode};
use crate::preprocess::{impute_missing, standardize};

/// Column used by the air-quality loader as the missing-value marker.
pub const AIR_QUALITY_SENTINEL: f64 = -200.0;

/// How to read a numeric CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    /// Field separator; defaults to a comma.
    pub delimiter: u8,
    /// Decimal mark inside numbers; defaults to a point. A comma here
    /// supports locales that write `2,5` for two and a half.
    pub decimal: char,
    /// Whether the first row is a header to skip; defaults to false.
    pub has_header: bool,
    /// Original file columns to keep, in the given order; `None` keeps
    /// all. Indices are zero-based.
    pub include: Option<Vec<usize>>,
    /// Cells exactly equal to this value are treated as missing and
    /// replaced by their column's observed mean; columns with no observed
    /// cells are dropped.
    pub sentinel: Option<f64>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            decimal: '.',
            has_header: false,
            include: None,
            sentinel: None,
        }
    }
}

/// A numeric table read from disk, with loading diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub dataset: Dataset,
    /// Original zero-based file indices of the dataset's columns.
    pub kept_columns: Vec<usize>,
    /// Original zero-based file indices of columns that were dropped:
    /// entirely empty, entirely sentinel, or without spread when the
    /// loader standardizes.
    pub dropped_columns: Vec<usize>,
    /// Number of sentinel cells replaced by column means.
    pub imputed_cells: usize,
}

fn csv_reader(path: &Path, options: &CsvOptions) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| QcError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .from_reader(file))
}

/// Reads a numeric matrix.
///
/// Rows whose cells are all empty are skipped. Columns that are empty in
/// every row are dropped and reported rather than treated as errors, so
/// files with trailing separators load cleanly. Any other empty or
/// non-numeric cell is an error naming its one-based row and column.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Loaded> {
    let path = path.as_ref();
    if options.decimal == options.delimiter as char {
        return Err(QcError::invalid(
            "decimal",
            "must differ from the field delimiter",
        ));
    }
    let mut rdr = csv_reader(path, options)?;

    // Collect non-blank records with the file line each starts on.
    let mut rows: Vec<(u64, csv::StringRecord)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| QcError::Csv {
            path: path.into(),
            source: e,
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(QcError::EmptyInput {
            context: "CSV contains no data rows",
        });
    }

    let width = rows[0].1.len();
    for (line, rec) in &rows {
        if rec.len() != width {
            return Err(QcError::InconsistentWidth {
                path: path.into(),
                row: *line as usize,
                expected: width,
                got: rec.len(),
            });
        }
    }

    let candidates: Vec<usize> = match &options.include {
        Some(cols) => {
            for &c in cols {
                if c >= width {
                    return Err(QcError::invalid(
                        "columns",
                        format!("index {c} out of range for a {width}-column file"),
                    ));
                }
            }
            cols.clone()
        }
        None => (0..width).collect(),
    };

    // A column empty on every row is dropped; a column empty on some rows
    // is a parse error at the first gap.
    let mut dropped: Vec<usize> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for &c in &candidates {
        if rows.iter().all(|(_, rec)| rec[c].trim().is_empty()) {
            dropped.push(c);
        } else {
            kept.push(c);
        }
    }
    if kept.is_empty() {
        return Err(QcError::EmptyInput {
            context: "CSV contains no non-empty columns",
        });
    }

    let mut matrix = Array2::<f64>::zeros((rows.len(), kept.len()));
    for (r, (line, rec)) in rows.iter().enumerate() {
        for (oc, &c) in kept.iter().enumerate() {
            let raw = rec[c].trim();
            let cell = if options.decimal == '.' {
                raw.to_string()
            } else {
                raw.replace(options.decimal, ".")
            };
            matrix[[r, oc]] = cell.parse::<f64>().map_err(|_| QcError::ParseCell {
                path: path.into(),
                row: *line as usize,
                col: c + 1,
                value: raw.to_string(),
            })?;
        }
    }

    let mut imputed_cells = 0;
    if let Some(sentinel) = options.sentinel {
        let imp = impute_missing(&matrix, sentinel)?;
        // Indices from the imputer refer to the matrix we passed; map them
        // back to original file columns.
        let mut next_kept = Vec::with_capacity(kept.len() - imp.dropped_columns.len());
        for (i, &orig) in kept.iter().enumerate() {
            if imp.dropped_columns.contains(&i) {
                dropped.push(orig);
            } else {
                next_kept.push(orig);
            }
        }
        kept = next_kept;
        matrix = imp.matrix;
        imputed_cells = imp.imputed_cells;
    }
    dropped.sort_unstable();

    Ok(Loaded {
        dataset: Dataset::new(matrix)?,
        kept_columns: kept,
        dropped_columns: dropped,
        imputed_cells,
    })
}

fn air_quality_options(path: &Path) -> Result<CsvOptions> {
    let mut options = CsvOptions {
        delimiter: b';',
        decimal: ',',
        has_header: true,
        include: None,
        sentinel: Some(AIR_QUALITY_SENTINEL),
    };
    // The first two columns are date and time stamps; everything after
    // them is numeric. Width comes from the header so trailing separators
    // are kept as candidate (then dropped, all-empty) columns.
    let mut rdr = csv_reader(path, &options)?;
    let width = rdr
        .headers()
        .map_err(|e| QcError::Csv {
            path: path.into(),
            source: e,
        })?
        .len();
    if width <= 2 {
        return Err(QcError::EmptyInput {
            context: "air-quality file has no columns after date and time",
        });
    }
    options.include = Some((2..width).collect());
    Ok(options)
}

/// Reads the UCI air-quality export without rescaling: semicolon
/// separated, comma decimals, date and time columns excluded, blank rows
/// and trailing empty columns dropped, `-200` sentinels imputed.
pub fn load_air_quality_raw(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    let options = air_quality_options(path)?;
    load_csv(path, &options)
}

/// [`load_air_quality_raw`] followed by per-column standardization, the
/// form the detection pipeline consumes.
pub fn load_air_quality(path: impl AsRef<Path>) -> Result<Loaded> {
    let raw = load_air_quality_raw(path)?;
    let std = standardize(raw.dataset.points())?;
    let mut kept = Vec::with_capacity(raw.kept_columns.len() - std.dropped_columns.len());
    let mut dropped = raw.dropped_columns;
    for (i, &orig) in raw.kept_columns.iter().enumerate() {
        if std.dropped_columns.contains(&i) {
            dropped.push(orig);
        } else {
            kept.push(orig);
        }
    }
    dropped.sort_unstable();
    Ok(Loaded {
        dataset: Dataset::new(std.matrix)?,
        kept_columns: kept,
        dropped_columns: dropped,
        imputed_cells: raw.imputed_cells,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| QcError::io(path, e))?,
    ))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| QcError::io(path, e))
}

/// Writes a scenario as CSV with headers `x0..x{d-1}` and a trailing
/// `truth` column holding `1` for planted anomalies.
pub fn write_scenario_csv(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io_err = |e: std::io::Error| QcError::io(path, e);
    let d = scenario.dataset.d();
    let header: Vec<String> = (0..d).map(|c| format!("x{c}")).collect();
    writeln!(w, "{},truth", header.join(",")).map_err(io_err)?;
    for i in 0..scenario.dataset.n() {
        let row = scenario.dataset.row(i);
        for v in row.iter() {
            write!(w, "{v},").map_err(io_err)?;
        }
        writeln!(w, "{}", u8::from(scenario.truth[i])).map_err(io_err)?;
    }
    finish(w, path)
}

/// Writes a potential grid as CSV with an `x,y,v` header, one row per
/// cell, rows varying x fastest. Values print in shortest round-trip
/// form, so re-parsing them reproduces the evaluated numbers exactly.
pub fn write_grid(grid: &PotentialGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io_err = |e: std::io::Error| QcError::io(path, e);
    writeln!(w, "x,y,v").map_err(io_err)?;
    for (x, y, v) in grid.cells() {
        writeln!(w, "{x},{y},{v}").map_err(io_err)?;
    }
    finish(w, path)
}

/// One dataset row in a [`RunReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub label: usize,
    pub outlier: bool,
    /// Where this point's descent settled.
    pub converged: Vec<f64>,
}

/// Run health counters carried alongside the per-point records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Descents that exhausted their iteration budget.
    pub non_converged: usize,
    /// Original indices of input columns dropped while loading.
    pub dropped_columns: Vec<usize>,
}

/// Everything needed to reproduce and audit one detection run. The JSON
/// serialization keeps this field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub sigma: f64,
    pub k: usize,
    pub merge_radius: f64,
    pub mode: PotentialMode,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub cluster_count: usize,
    pub cluster_sizes: Vec<usize>,
    pub outlier_count: usize,
    pub points: Vec<PointRecord>,
    pub diagnostics: Diagnostics,
}

impl RunReport {
    /// Assembles a report from a finished detection.
    pub fn from_detection(det: &Detection, seed: u64, dropped_columns: Vec<usize>) -> RunReport {
        let n = det.result.labels.len();
        let d = det.result.converged.ncols();
        let points = (0..n)
            .map(|i| PointRecord {
                index: i,
                label: det.result.labels[i],
                outlier: det.result.outlier_flags[i],
                converged: det.result.converged.row(i).to_vec(),
            })
            .collect();
        RunReport {
            sigma: det.sigma,
            k: det.k,
            merge_radius: det.merge_radius,
            mode: det.mode,
            seed,
            n,
            d,
            cluster_count: det.result.cluster_sizes.len(),
            cluster_sizes: det.result.cluster_sizes.clone(),
            outlier_count: det.result.outlier_flags.iter().filter(|f| **f).count(),
            points,
            diagnostics: Diagnostics {
                non_converged: det.non_converged,
                dropped_columns,
            },
        }
    }
}

/// Writes a report as pretty-printed JSON with a trailing newline.
pub fn write_report(report: &RunReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n").map_err(|e| QcError::io(path, e))?;
    finish(w, path)
}

/// Reads back a report written by [`write_report`].
pub fn read_report(path: impl AsRef<Path>) -> Result<RunReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| QcError::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}
