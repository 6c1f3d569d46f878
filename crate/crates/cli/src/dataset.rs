//! Dataset file I/O.
//!
//! The native format is a self-describing JSON object
//! `{"n", "p", "count", "observations": [[row-major n·p values], ...]}`
//! with an optional `"location"` entry (row-major M) that `simulate` writes so
//! downstream commands can draw marginal location lines. A long-format CSV
//! importer (`obs,row,col,value`) is provided for interoperability; files with
//! a `.csv` extension are parsed as CSV, everything else as JSON.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// A dataset of equally sized observation matrices, optionally carrying the
/// location matrix it was generated from.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub observations: Vec<DMatrix<f64>>,
    pub location: Option<DMatrix<f64>>,
}

impl Dataset {
    /// Validates shape consistency and finiteness.
    pub fn new(
        observations: Vec<DMatrix<f64>>,
        location: Option<DMatrix<f64>>,
    ) -> CliResult<Self> {
        let first = observations
            .first()
            .ok_or_else(|| CliError::invalid("dataset has no observations"))?;
        let (n, p) = first.shape();
        if n == 0 || p == 0 {
            return Err(CliError::invalid("observations must be non-empty matrices"));
        }
        for (i, x) in observations.iter().enumerate() {
            if x.shape() != (n, p) {
                return Err(CliError::invalid(format!(
                    "observation {i} is {}x{}, expected {n}x{p}",
                    x.nrows(),
                    x.ncols()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(CliError::invalid(format!(
                    "observation {i} contains a non-finite value"
                )));
            }
        }
        if let Some(m) = &location {
            if m.shape() != (n, p) {
                return Err(CliError::invalid(format!(
                    "location is {}x{}, expected {n}x{p}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(CliError::invalid("location contains a non-finite value"));
            }
        }
        Ok(Dataset { observations, location })
    }

    pub fn n(&self) -> usize {
        self.observations[0].nrows()
    }

    pub fn p(&self) -> usize {
        self.observations[0].ncols()
    }

    pub fn count(&self) -> usize {
        self.observations.len()
    }
}

/// On-disk JSON mirror of [`Dataset`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    n: usize,
    p: usize,
    count: usize,
    observations: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    location: Option<Vec<f64>>,
}

fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn from_row_major(n: usize, p: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, p, data)
}

/// Reads a dataset, dispatching on the file extension (`.csv` → long-format
/// CSV, anything else → JSON).
pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv { read_csv(path) } else { read_json(path) }
}

fn read_json(path: &Path) -> CliResult<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let file: DatasetFile = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let ctx = |msg: String| CliError::invalid(format!("{}: {msg}", path.display()));
    if file.n == 0 || file.p == 0 {
        return Err(ctx("n and p must be positive".into()));
    }
    if file.count != file.observations.len() {
        return Err(ctx(format!(
            "count is {} but {} observations are present",
            file.count,
            file.observations.len()
        )));
    }
    let cell = file.n * file.p;
    let mut observations = Vec::with_capacity(file.observations.len());
    for (i, row) in file.observations.iter().enumerate() {
        if row.len() != cell {
            return Err(ctx(format!(
                "observation {i} has {} values, expected {cell}",
                row.len()
            )));
        }
        observations.push(from_row_major(file.n, file.p, row));
    }
    let location = match &file.location {
        Some(row) if row.len() != cell => {
            return Err(ctx(format!(
                "location has {} values, expected {cell}",
                row.len()
            )));
        }
        Some(row) => Some(from_row_major(file.n, file.p, row)),
        None => None,
    };
    Dataset::new(observations, location)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Writes the dataset in the documented JSON format (pretty-printed; stable
/// across runs for byte-level reproducibility checks).
pub fn write_dataset(path: &Path, ds: &Dataset) -> CliResult<()> {
    let file = DatasetFile {
        n: ds.n(),
        p: ds.p(),
        count: ds.count(),
        observations: ds.observations.iter().map(to_row_major).collect(),
        location: ds.location.as_ref().map(|m| to_row_major(m)),
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Long-format CSV importer: lines `obs,row,col,value`, one matrix cell per
/// line, forming a complete grid. Indices may start at 0 or (uniformly) at 1;
/// an `obs,row,col,value` header line is skipped if present.
fn read_csv(path: &Path) -> CliResult<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let ctx = |msg: String| CliError::invalid(format!("{}: {msg}", path.display()));

    let mut entries: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut first_data_line = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(ctx(format!(
                "line {}: expected 4 fields obs,row,col,value, got {}",
                idx + 1,
                fields.len()
            )));
        }
        if first_data_line && fields[0].parse::<usize>().is_err() {
            // Header row.
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        let parse_idx = |s: &str, name: &str| {
            s.parse::<usize>()
                .map_err(|_| ctx(format!("line {}: {name} index {s:?} is not a non-negative integer", idx + 1)))
        };
        let obs = parse_idx(fields[0], "obs")?;
        let row = parse_idx(fields[1], "row")?;
        let col = parse_idx(fields[2], "col")?;
        let value: f64 = fields[3]
            .parse()
            .map_err(|_| ctx(format!("line {}: value {:?} is not a number", idx + 1, fields[3])))?;
        if !value.is_finite() {
            return Err(ctx(format!("line {}: value is not finite", idx + 1)));
        }
        entries.push((obs, row, col, value));
    }
    if entries.is_empty() {
        return Err(ctx("no data rows".into()));
    }

    // Accept 0-based indices natively; a file whose obs, row, and col indices
    // all start at 1 is treated as 1-based and shifted.
    let min3 = entries.iter().fold((usize::MAX, usize::MAX, usize::MAX), |acc, e| {
        (acc.0.min(e.0), acc.1.min(e.1), acc.2.min(e.2))
    });
    let base = match min3 {
        (0, 0, 0) => 0,
        (1, 1, 1) => 1,
        _ => {
            return Err(ctx(format!(
                "obs/row/col indices must start at 0 (or uniformly at 1); minima were {min3:?}"
            )));
        }
    };

    let (mut count, mut n, mut p) = (0, 0, 0);
    for e in &entries {
        count = count.max(e.0 - base + 1);
        n = n.max(e.1 - base + 1);
        p = p.max(e.2 - base + 1);
    }
    let mut grid: Vec<Option<f64>> = vec![None; count * n * p];
    for (obs, row, col, value) in entries {
        let slot = &mut grid[((obs - base) * n + (row - base)) * p + (col - base)];
        if slot.is_some() {
            return Err(ctx(format!(
                "duplicate cell (obs {obs}, row {row}, col {col})"
            )));
        }
        *slot = Some(value);
    }
    let mut observations = Vec::with_capacity(count);
    for k in 0..count {
        let mut cells = Vec::with_capacity(n * p);
        for i in 0..n {
            for j in 0..p {
                cells.push(grid[(k * n + i) * p + j].ok_or_else(|| {
                    ctx(format!(
                        "missing cell (obs {}, row {}, col {})",
                        k + base,
                        i + base,
                        j + base
                    ))
                })?);
            }
        }
        observations.push(from_row_major(n, p, &cells));
    }
    Dataset::new(observations, None)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}
