//! Two-column numeric tables. Floats use the shortest representation that
//! parses back to the same value, so a write/read cycle is lossless.

use std::path::Path;

use kprab::operators::{Grid1D, SampledFunction};
use kprab::{Grid, Samples};

use crate::error::{CliError, CliResult};

pub fn write_table(path: &Path, header: [&str; 2], rows: &[(f64, f64)]) -> CliResult<()> {
    write_rows(path, &header, rows.iter().map(|(x, v)| vec![*x, *v]))
}

/// Writes `x,<value_header>`, plus a `derivative` column when one is attached.
pub fn write_samples(path: &Path, f: &Samples, value_header: &str) -> CliResult<()> {
    let xs = f.grid.nodes();
    match &f.derivative_values {
        Some(d) => write_rows(
            path,
            &["x", value_header, "derivative"],
            (0..xs.len()).map(|i| vec![xs[i], f.values[i], d[i]]),
        ),
        None => write_rows(
            path,
            &["x", value_header],
            (0..xs.len()).map(|i| vec![xs[i], f.values[i]]),
        ),
    }
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,<value>[,derivative]`. The x column must be uniform.
pub fn read_samples(path: &Path) -> CliResult<Samples> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = r.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "x" {
        return Err(CliError::Config(format!(
            "{}: expected a header starting with `x,`",
            path.display()
        )));
    }
    let with_derivative = headers.len() >= 3 && &headers[2] == "derivative";
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    let mut ds = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> CliResult<f64> {
            rec.get(i)
                .ok_or_else(|| CliError::Config(format!("{}: row {} is short", path.display(), line + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{}: row {}: {e}", path.display(), line + 2)))
        };
        xs.push(num(0)?);
        vs.push(num(1)?);
        if with_derivative {
            ds.push(num(2)?);
        }
    }
    let grid = uniform_grid(&xs).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;
    let f = SampledFunction::new(grid, vs)?;
    Ok(if with_derivative { f.with_derivative(ds)? } else { f })
}

fn uniform_grid(xs: &[f64]) -> Result<Grid, String> {
    if xs.len() < 2 {
        return Err("need at least 2 rows".into());
    }
    let n = xs.len();
    let step = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    for (i, x) in xs.iter().enumerate() {
        let want = xs[0] + i as f64 * step;
        if (x - want).abs() > 1e-9 * step.abs().max(x.abs()) {
            return Err(format!("x column is not uniform at row {}", i + 2));
        }
    }
    Grid1D::new(xs[0], step, n).map_err(|e| e.to_string())
}
