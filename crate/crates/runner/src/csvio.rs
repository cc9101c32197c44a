//! CSV output and input.
//!
//! Reals are written as `{:.16e}` (17 significant digits, enough to
//! round-trip every `f64`), integers in decimal, and missing values as
//! empty cells. The header row is always present.

use std::io::{Read, Write};

use crate::calibrate::CalibrationRow;
use crate::error::{Result, RunnerError};
use crate::sweep::{SweepRow, SweepTable};

pub const SWEEP_COLUMNS: [&str; 7] = ["p_g_exact", "overlap_from_pg", "overlap_oracle", "p_g_sampled", "stderr", "shots", "seed"];
pub const CALIBRATION_COLUMNS: [&str; 6] = ["duration_s", "p_e_exact", "p_e_sampled", "stderr", "shots", "seed"];

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn opt_int(v: Option<u64>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

fn csv_err(origin: &str, e: impl std::fmt::Display) -> RunnerError {
    RunnerError::Csv { path: origin.to_string(), message: e.to_string() }
}

pub fn write_sweep<W: Write>(out: W, table: &SweepTable) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let header: Vec<&str> = table.axis_names.iter().map(String::as_str).chain(SWEEP_COLUMNS).collect();
    w.write_record(&header).map_err(|e| csv_err("output", e))?;
    for r in &table.rows {
        let mut rec: Vec<String> = r.axis_values.iter().map(|&v| real(v)).collect();
        rec.extend([
            real(r.p_g_exact),
            real(r.overlap_from_pg),
            real(r.overlap_oracle),
            opt_real(r.p_g_sampled),
            opt_real(r.stderr),
            opt_int(r.shots),
            r.seed.to_string(),
        ]);
        w.write_record(&rec).map_err(|e| csv_err("output", e))?;
    }
    w.flush().map_err(|e| csv_err("output", e))
}

pub fn write_calibration<W: Write>(out: W, rows: &[CalibrationRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CALIBRATION_COLUMNS).map_err(|e| csv_err("output", e))?;
    for r in rows {
        w.write_record([
            real(r.duration),
            real(r.p_e_exact),
            opt_real(r.p_e_sampled),
            opt_real(r.stderr),
            opt_int(r.shots),
            r.seed.to_string(),
        ])
        .map_err(|e| csv_err("output", e))?;
    }
    w.flush().map_err(|e| csv_err("output", e))
}

/// Raw string cells with their header.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub origin: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read<R: Read>(input: R, origin: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(|e| csv_err(origin, e))?.iter().map(str::to_string).collect::<Vec<_>>();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(csv_err(origin, "missing header row"));
        }
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()
            .map_err(|e| csv_err(origin, e))?;
        Ok(Self { origin: origin.to_string(), header, rows })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| RunnerError::io(path, e))?;
        Self::read(file, &path.display().to_string())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column parsed as reals; empty cells become `None`.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self.index_of(name).ok_or_else(|| csv_err(&self.origin, format!("no column `{name}`")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let cell = row[k].trim();
                if cell.is_empty() {
                    return Ok(None);
                }
                cell.parse::<f64>()
                    .map(Some)
                    .map_err(|_| csv_err(&self.origin, format!("row {}: `{cell}` in `{name}` is not a number", i + 2)))
            })
            .collect()
    }

    fn int_column(&self, name: &str) -> Result<Vec<Option<u64>>> {
        let k = self.index_of(name).ok_or_else(|| csv_err(&self.origin, format!("no column `{name}`")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let cell = row[k].trim();
                if cell.is_empty() {
                    return Ok(None);
                }
                cell.parse::<u64>()
                    .map(Some)
                    .map_err(|_| csv_err(&self.origin, format!("row {}: `{cell}` in `{name}` is not an integer", i + 2)))
            })
            .collect()
    }

    fn required(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| csv_err(&self.origin, format!("row {}: `{name}` is empty", i + 2))))
            .collect()
    }

    pub fn is_calibration(&self) -> bool {
        self.header.iter().map(String::as_str).eq(CALIBRATION_COLUMNS)
    }

    pub fn to_sweep(&self) -> Result<SweepTable> {
        let n_axes = self.header.len().saturating_sub(SWEEP_COLUMNS.len());
        if self.header.len() < SWEEP_COLUMNS.len() + 1 || !self.header[n_axes..].iter().map(String::as_str).eq(SWEEP_COLUMNS) {
            return Err(csv_err(&self.origin, "not a sweep table"));
        }
        let axis_names = self.header[..n_axes].to_vec();
        let axes: Vec<Vec<f64>> = axis_names.iter().map(|a| self.required(a)).collect::<Result<_>>()?;
        let p_g = self.required("p_g_exact")?;
        let overlap = self.required("overlap_from_pg")?;
        let oracle = self.required("overlap_oracle")?;
        let sampled = self.column("p_g_sampled")?;
        let stderr = self.column("stderr")?;
        let shots = self.int_column("shots")?;
        let seeds = self.int_column("seed")?;
        let rows = (0..self.rows.len())
            .map(|i| {
                Ok(SweepRow {
                    axis_values: axes.iter().map(|a| a[i]).collect(),
                    p_g_exact: p_g[i],
                    overlap_from_pg: overlap[i],
                    overlap_oracle: oracle[i],
                    p_g_sampled: sampled[i],
                    stderr: stderr[i],
                    shots: shots[i],
                    seed: seeds[i].ok_or_else(|| csv_err(&self.origin, format!("row {}: `seed` is empty", i + 2)))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepTable { axis_names, rows })
    }

    pub fn to_calibration(&self) -> Result<Vec<CalibrationRow>> {
        if !self.is_calibration() {
            return Err(csv_err(&self.origin, "not a calibration table"));
        }
        let t = self.required("duration_s")?;
        let p = self.required("p_e_exact")?;
        let sampled = self.column("p_e_sampled")?;
        let stderr = self.column("stderr")?;
        let shots = self.int_column("shots")?;
        let seeds = self.int_column("seed")?;
        (0..self.rows.len())
            .map(|i| {
                Ok(CalibrationRow {
                    duration: t[i],
                    p_e_exact: p[i],
                    p_e_sampled: sampled[i],
                    stderr: stderr[i],
                    shots: shots[i],
                    seed: seeds[i].ok_or_else(|| csv_err(&self.origin, format!("row {}: `seed` is empty", i + 2)))?,
                })
            })
            .collect()
    }
}
