//! Output formats: CSV tables, the run manifest, and the binary field dump.
//!
//! CSV: fixed header, `.` decimal separator, every number in scientific
//! notation with 17 significant digits.
//!
//! Manifest: one `key = value` pair per line, lists comma separated.
//!
//! Field dump (little-endian): the 8 bytes `HELIXFD1`, then `n_r`, `n_theta`
//! and the component count as `u64`, then each component as `(n_r + 1) *
//! n_theta` `f64` values, ring-major with the boundary ring last.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{HelixError, Result};
use crate::field::{ScalarField, VectorField3};
use crate::grid::{build_grid, DiskGrid};

pub const NS_CONVERGE_HEADER: [&str; 4] = ["sigma", "t_star", "l2_theta", "h1_theta_timeint"];
pub const EULER_CONVERGE_HEADER: [&str; 7] = [
    "sigma",
    "t_star",
    "l2_psi",
    "h1_psi",
    "drift_l1",
    "drift_l2",
    "drift_linf",
];
pub const ENERGY_HEADER: [&str; 5] = [
    "t",
    "kinetic",
    "dissipation_viscous",
    "dissipation_sigma",
    "residual",
];
pub const F_BOUND_HEADER: [&str; 3] = ["sigma", "f_norm", "f_bound"];
pub const SCALING_HEADER: [&str; 7] = [
    "sigma",
    "family",
    "u_l2",
    "w_l2",
    "l2_rel_error",
    "grad_ratio",
    "d3_constant",
];

pub const DUMP_MAGIC: &[u8; 8] = b"HELIXFD1";

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV cell: numbers are formatted with [`format_number`].
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(HelixError::Format(format!(
                "row has {} cells, header has {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|c| match c {
            Cell::Num(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
        }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn numeric_rows(rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<Vec<Cell>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(Cell::Num).collect())
        .collect()
}

/// Reads a CSV written by [`write_csv`] with only numeric columns.
pub fn read_numeric_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| HelixError::Format(format!("non-numeric cell '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    entries: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(exp: Experiment, cfg: &ExperimentConfig) -> Self {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("experiment", exp.name().into());
        put("version", env!("CARGO_PKG_VERSION").into());
        put("seed", cfg.seed.to_string());
        put("grid.n_r", cfg.grid.n_r.to_string());
        put("grid.n_theta", cfg.grid.n_theta.to_string());
        put("grid.n_z", cfg.grid.n_z.to_string());
        put("time.dt", format_number(cfg.time.dt));
        put("time.t_end", format_number(cfg.time.t_end));
        put("time.nu", format_number(cfg.time.nu));
        put("time.cfl", format_number(cfg.time.cfl));
        put(
            "sweep.sigmas",
            cfg.sweep.sigmas.iter().map(|s| format_number(*s)).collect::<Vec<_>>().join(","),
        );
        let i = &cfg.initial;
        put("initial.family", i.family.clone());
        put("initial.amplitude", format_number(i.amplitude));
        put("initial.cx", format_number(i.cx));
        put("initial.cy", format_number(i.cy));
        put("initial.width", format_number(i.width));
        if let Some(d) = &i.dump {
            put("initial.dump", d.display().to_string());
        }
        let t = &cfg.tolerances;
        for (k, v) in [
            ("proj_tol", t.proj_tol),
            ("energy", t.energy),
            ("slope", t.slope),
            ("slope_slack", t.slope_slack),
            ("floor", t.floor),
            ("drift", t.drift),
            ("identity", t.identity),
        ] {
            put(&format!("tolerances.{k}"), format_number(v));
        }
        Self { entries: m }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HelixError::Format(format!("manifest line {} has no '='", n + 1)))?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub fn write_field_dump(path: &Path, fields: &[&ScalarField]) -> Result<()> {
    let first = fields
        .first()
        .ok_or_else(|| HelixError::Format("nothing to dump".into()))?;
    let g = first.grid();
    for f in fields {
        g.check_same(f.grid())?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(DUMP_MAGIC)?;
    for v in [g.n_r, g.n_theta, fields.len()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    for f in fields {
        for x in f.phys().iter() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_vector_dump(path: &Path, w: &VectorField3) -> Result<()> {
    write_field_dump(path, &w.components())
}

/// Reads a dump; the grid is rebuilt from the header.
pub fn read_field_dump(path: &Path) -> Result<(Arc<DiskGrid>, Vec<ScalarField>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| HelixError::Format("truncated header".into()))?;
    if &magic != DUMP_MAGIC {
        return Err(HelixError::Format("bad magic".into()));
    }
    let mut word = [0u8; 8];
    let mut head = [0usize; 3];
    for h in head.iter_mut() {
        r.read_exact(&mut word)
            .map_err(|_| HelixError::Format("truncated header".into()))?;
        *h = u64::from_le_bytes(word) as usize;
    }
    let [n_r, n_theta, count] = head;
    let grid = build_grid(n_r, n_theta)?;
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut word)
                .map_err(|_| HelixError::Format("truncated payload".into()))?;
            v.push(f64::from_le_bytes(word));
        }
        fields.push(ScalarField::from_values(&grid, v));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(HelixError::Format(format!("{} trailing bytes", rest.len())));
    }
    Ok((grid, fields))
}

pub fn read_vector_dump(path: &Path) -> Result<VectorField3> {
    let (_, f) = read_field_dump(path)?;
    match <[ScalarField; 3]>::try_from(f) {
        Ok([a, b, c]) => VectorField3::new(a, b, c),
        Err(f) => Err(HelixError::Format(format!(
            "expected 3 components, found {}",
            f.len()
        ))),
    }
}
