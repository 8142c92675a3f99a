//! Result files: per-user CSV, JSON summaries, long-format sweep CSV and matrix snapshots.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::experiment::{scenario_label, DropResult, SweepPoint};
use crate::linalg::{CMatrix, C64};

pub const MATRIX_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Channel,
    Precoder,
}

/// Versioned JSON snapshot of a complex matrix, row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub format_version: u32,
    pub kind: MatrixKind,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub num_gateways: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub quantized: bool,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn new(kind: MatrixKind, seed: u64, num_gateways: usize, m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                entries.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
        Self {
            format_version: MATRIX_FORMAT_VERSION,
            kind,
            seed,
            rows: m.nrows(),
            cols: m.ncols(),
            num_gateways,
            flavor: None,
            alpha: None,
            quantized: false,
            entries,
        }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        if self.format_version != MATRIX_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported matrix format version {}",
                self.format_version
            )));
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "{} entries for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        if self.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format("matrix file contains non-finite entries".into()));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.entries[r * self.cols + c];
            C64::new(re, im)
        }))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let f = File::open(path)?;
        let file: Self = serde_json::from_reader(BufReader::new(f))
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        file.matrix()?;
        Ok(file)
    }
}

#[derive(Debug, Serialize)]
struct ResultRow<'a> {
    drop: usize,
    seed: u64,
    scenario: &'a str,
    user: usize,
    beam: usize,
    cluster: usize,
    sinr_db: f64,
    efficiency_bps: f64,
}

/// One row per user of every included drop.
pub fn write_results_csv<W: Write>(out: W, results: &[DropResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        let scenario = scenario_label(r.scheme);
        for u in &r.users {
            w.serialize(ResultRow {
                drop: r.drop,
                seed: r.seed,
                scenario: &scenario,
                user: u.user,
                beam: u.beam,
                cluster: u.cluster,
                sinr_db: u.sinr_db,
                efficiency_bps: u.efficiency_bps,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    sweep: String,
    scenario: String,
    power_dbw: f64,
    num_interferers: usize,
    rho: f64,
    drops: usize,
    excluded: usize,
    mean_efficiency_bps: Option<f64>,
    median_efficiency_bps: Option<f64>,
    p5_efficiency_bps: Option<f64>,
    p95_efficiency_bps: Option<f64>,
    mean_sum_efficiency_bps: Option<f64>,
}

/// Long-format sweep table, one row per point.
pub fn write_sweep_csv<W: Write>(out: W, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        let e = p.summary.efficiency;
        w.serialize(SweepRow {
            sweep: p.sweep.clone(),
            scenario: p.summary.scenario.clone(),
            power_dbw: p.power_dbw,
            num_interferers: p.num_interferers,
            rho: p.rho,
            drops: p.summary.drops_requested,
            excluded: p.summary.excluded.len(),
            mean_efficiency_bps: e.map(|e| e.per_user.mean),
            median_efficiency_bps: e.map(|e| e.per_user.median),
            p5_efficiency_bps: e.map(|e| e.per_user.p5),
            p95_efficiency_bps: e.map(|e| e.per_user.p95),
            mean_sum_efficiency_bps: e.map(|e| e.sum.mean),
        })?;
    }
    w.flush()?;
    Ok(())
}
