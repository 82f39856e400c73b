//! Plain-text density-matrix dumps.
//!
//! Line 1 is `n_points,x_min,x_max,t`; then `n_points²` lines `re,im` in
//! row-major order (row index `x`, column index `x'`). Floats use 17
//! significant digits, so a dump reads back bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use squeezed_core::{DensityMatrixSample, GridSpec};

use crate::error::{CliError, CliResult};

/// 17 significant digits; negative zero prints as zero.
pub(crate) fn fmt(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

pub fn render_density(dm: &DensityMatrixSample) -> String {
    let grid = dm.grid();
    let n = grid.n_points();
    let mut out = String::with_capacity(n * n * 48 + 96);
    let _ = writeln!(out, "{},{},{},{}", n, fmt(grid.x_min()), fmt(grid.x_max()), fmt(dm.time()));
    for z in dm.values().iter() {
        let _ = writeln!(out, "{},{}", fmt(z.re), fmt(z.im));
    }
    out
}

pub fn write_density(path: &Path, dm: &DensityMatrixSample) -> CliResult<()> {
    std::fs::write(path, render_density(dm)).map_err(|e| CliError::io(path, e))
}

fn malformed(path: &Path, message: String) -> CliError {
    CliError::Parse {
        path: path.to_owned(),
        message,
    }
}

/// Reads a dump back, validating Hermiticity and the trace.
pub fn read_density(path: &Path) -> CliResult<DensityMatrixSample> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(path, "empty file".into()))?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() != 4 {
        return Err(malformed(path, format!("header needs 4 fields, got {header:?}")));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|e| malformed(path, format!("n_points: {e}")))?;
    let float = |s: &str, what: &str| s.parse::<f64>().map_err(|e| malformed(path, format!("{what}: {e}")));
    let (x_min, x_max, t) = (float(fields[1], "x_min")?, float(fields[2], "x_max")?, float(fields[3], "t")?);
    let grid = GridSpec::new(x_min, x_max, n).map_err(|e| malformed(path, e.to_string()))?;
    let mut values = Vec::with_capacity(n * n);
    for (k, line) in lines.enumerate() {
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| malformed(path, format!("row {k}: expected re,im")))?;
        values.push(Complex64::new(float(re, "re")?, float(im, "im")?));
    }
    if values.len() != n * n {
        return Err(malformed(path, format!("expected {} rows, got {}", n * n, values.len())));
    }
    let matrix = Array2::from_shape_vec((n, n), values).expect("length checked");
    DensityMatrixSample::new(grid, matrix, t).map_err(|e| malformed(path, e.to_string()))
}
