//! Link-quality figures: SINR, MODCOD efficiency, SMSE and aggregate statistics.

pub mod modcod;
pub mod smse;

use serde::{Deserialize, Serialize};

pub use modcod::{modcod_efficiency, ModcodRow, ModcodTable};
pub use smse::{
    check_interlacing, interlacing_violation, selection_contracts, smse, smse_from_eigenvalues, check_smse_ordering,
    SmsePair, OrderingCheck,
};

use crate::error::{Error, Result};
use crate::linalg::{to_db, CMatrix};

/// `SINR_k = |(HT)_kk|² / (Σ_{j≠k} |(HT)_kj|² + 1)` with unit noise variance.
pub fn sinr(h: &CMatrix, t: &CMatrix) -> Result<Vec<f64>> {
    if h.ncols() != t.nrows() || h.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "H is {}x{}, T is {}x{}",
            h.nrows(),
            h.ncols(),
            t.nrows(),
            t.ncols()
        )));
    }
    let ht = h * t;
    Ok((0..ht.nrows())
        .map(|k| {
            let row = ht.row(k);
            let signal = row[k].norm_sqr();
            let interference: f64 = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            signal / (interference + 1.0)
        })
        .collect())
}

pub fn sinr_db(h: &CMatrix, t: &CMatrix) -> Result<Vec<f64>> {
    Ok(sinr(h, t)?.into_iter().map(to_db).collect())
}

/// Per-user MSE of a unit-gain receiver, `|1 − (HT)_kk|² + Σ_{j≠k} |(HT)_kj|² + 1`.
///
/// This is the textbook linear-receiver expression, reported alongside the trace-form SMSE.
pub fn per_user_mse(h: &CMatrix, t: &CMatrix) -> Result<Vec<f64>> {
    let s = sinr(h, t)?;
    let ht = h * t;
    Ok(s.iter()
        .enumerate()
        .map(|(k, _)| {
            let row = ht.row(k);
            let own = (crate::linalg::c(1.0, 0.0) - row[k]).norm_sqr();
            let rest: f64 = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            own + rest + 1.0
        })
        .collect())
}

/// Sum that does not depend on the input order: values are sorted, then added pairwise.
pub fn stable_sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    pairwise(&v)
}

fn pairwise(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
    }
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 100]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub p5: f64,
    pub p95: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("no values to summarize".into()));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Ok(Self {
            mean: pairwise(&v) / v.len() as f64,
            median: percentile(&v, 50.0),
            p5: percentile(&v, 5.0),
            p95: percentile(&v, 95.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySummary {
    pub drops: usize,
    pub users: usize,
    /// Over every user of every drop, bits/symbol.
    pub per_user: Stats,
    /// Over drops, of the per-drop sum across users.
    pub sum: Stats,
}

/// Statistics of per-user efficiencies, one inner vector per drop.
pub fn spectral_efficiency_summary(drops: &[Vec<f64>]) -> Result<EfficiencySummary> {
    if drops.is_empty() {
        return Err(Error::InvalidParameter("no drops to summarize".into()));
    }
    let all: Vec<f64> = drops.iter().flatten().copied().collect();
    let sums: Vec<f64> = drops.iter().map(|d| stable_sum(d)).collect();
    Ok(EfficiencySummary {
        drops: drops.len(),
        users: all.len(),
        per_user: Stats::of(&all)?,
        sum: Stats::of(&sums)?,
    })
}
