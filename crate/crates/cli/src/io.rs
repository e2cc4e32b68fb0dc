//! Sample ingestion and table output.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use fourier_extension::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Tolerance for the abscissae of an input file.
pub const GRID_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Point {
    pub fn new(t: f64, z: C64) -> Self {
        Self { t, re: z.re, im: z.im }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Reads a `t,re[,im]` CSV file.
pub fn read_points(path: &Path) -> Result<Vec<Point>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        .clone();
    if headers.get(0) != Some("t") || headers.get(1) != Some("re") {
        return Err(CliError::Validation(format!(
            "{}: header must be `t,re` or `t,re,im`",
            path.display()
        )));
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            let p: Point = row.map_err(|e| {
                CliError::Validation(format!("{}: row {}: {e}", path.display(), i + 1))
            })?;
            if ![p.t, p.re, p.im].iter().all(|v| v.is_finite()) {
                return Err(CliError::Validation(format!(
                    "{}: row {} is not finite",
                    path.display(),
                    i + 1
                )));
            }
            Ok(p)
        })
        .collect()
}

/// Checks that `points` sit on `t_ℓ = ℓ/M`, `ℓ = -M..=M`, and returns `M`.
pub fn uniform_half_count(points: &[Point]) -> Result<usize, CliError> {
    let n = points.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(CliError::Validation(format!(
            "need an odd number 2M+1 ≥ 3 of samples, got {n}"
        )));
    }
    let m = (n - 1) / 2;
    for (i, p) in points.iter().enumerate() {
        let expected = (i as f64 - m as f64) / m as f64;
        if (p.t - expected).abs() > GRID_TOLERANCE {
            return Err(CliError::Validation(format!(
                "abscissa {} is {}, expected {expected} on the uniform grid of [-1, 1]",
                i + 1,
                p.t
            )));
        }
    }
    Ok(m)
}

/// Checks that `points` sit on `expected` and returns their values.
pub fn match_abscissae(points: &[Point], expected: &[f64], what: &str) -> Result<Vec<C64>, CliError> {
    if points.len() != expected.len() {
        return Err(CliError::Validation(format!(
            "{what}: expected {} rows, got {}",
            expected.len(),
            points.len()
        )));
    }
    points
        .iter()
        .zip(expected)
        .map(|(p, &t)| {
            if (p.t - t).abs() > GRID_TOLERANCE {
                Err(CliError::Validation(format!("{what}: abscissa {} should be {t}", p.t)))
            } else {
                Ok(p.value())
            }
        })
        .collect()
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes `rows` as CSV with a header, or as a JSON array.
pub fn write_rows<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let out = sink(path)?;
    let io_err = |e: &dyn std::fmt::Display| CliError::Validation(format!("writing output: {e}"));
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| io_err(&e))?;
            }
            w.flush().map_err(|e| io_err(&e))?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| io_err(&e))?;
            writeln!(out).map_err(|e| io_err(&e))?;
        }
    }
    Ok(())
}

/// Writes a single record: one CSV row with header, or one JSON object.
pub fn write_record<T: Serialize>(record: &T, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    match format {
        Format::Csv => write_rows(std::slice::from_ref(record), format, path),
        Format::Json => {
            let mut out = sink(path)?;
            serde_json::to_writer_pretty(&mut out, record)
                .and_then(|_| writeln!(out).map_err(serde_json::Error::io))
                .map_err(|e| CliError::Validation(format!("writing output: {e}")))
        }
    }
}
