//! One Monte Carlo drop end to end, and runs over many drops.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_fading, check_dimensions, place_users, sample_rain, user_link_matrix, ChannelMatrix,
    GeometryConfig, HexGrid, UserPosition,
};
use crate::cooperation::{overhead_for_layout, scheme_precoder, CooperationScheme, Overhead};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::rng::{drop_seed, stream_rng, Stream};
use crate::impairments::{apply_feeder, feeder_matrix};
use crate::linalg::{identity, CMatrix};
use crate::metrics::{sinr, smse, spectral_efficiency_summary, stable_sum, EfficiencySummary, ModcodTable};
use crate::precoder::{leakage_ratio, PrecoderSet, Structure};

/// Channel realization of one drop.
#[derive(Debug, Clone)]
pub struct DropChannel {
    pub drop: usize,
    pub seed: u64,
    pub users: Vec<UserPosition>,
    pub attenuation: Vec<f64>,
    /// User link `H_u = D·W`.
    pub user_link: ChannelMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserResult {
    pub user: usize,
    pub beam: usize,
    pub cluster: usize,
    pub sinr: f64,
    pub sinr_db: f64,
    pub efficiency_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropResult {
    pub drop: usize,
    pub seed: u64,
    pub scheme: CooperationScheme,
    pub users: Vec<UserResult>,
    pub smse_no_interference: f64,
    pub smse_interference: f64,
    pub overhead: Overhead,
    /// Out-of-cluster over in-cluster response per gateway; empty for the single-gateway reference.
    pub leakage: Vec<f64>,
    /// Set when the drop was excluded after a numerical failure.
    pub excluded: Option<String>,
}

impl DropResult {
    pub fn is_excluded(&self) -> bool {
        self.excluded.is_some()
    }

    pub fn efficiencies(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.efficiency_bps).collect()
    }

    pub fn sum_efficiency(&self) -> f64 {
        stable_sum(&self.efficiencies())
    }
}

/// Fixed per-configuration state shared by all drops.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub grid: HexGrid,
    pub geometry: GeometryConfig,
    pub table: ModcodTable,
    feeder: Option<CMatrix>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let geometry = config.geometry(&grid);
        check_dimensions(&geometry, &grid.layout)?;
        let model = config.feeder_model();
        let feeder = if model.is_ideal() {
            None
        } else {
            Some(feeder_matrix(&model, &grid.layout).map_err(|e| Error::Config(e.to_string()))?)
        };
        Ok(Self {
            config,
            grid,
            geometry,
            table: ModcodTable::dvb_s2x(),
            feeder,
        })
    }

    pub fn with_table(mut self, table: ModcodTable) -> Self {
        self.table = table;
        self
    }

    pub fn layout(&self) -> &crate::channel::ClusterLayout {
        &self.grid.layout
    }

    /// `H_f`, or the identity when the feeder links are ideal.
    pub fn feeder(&self) -> CMatrix {
        self.feeder
            .clone()
            .unwrap_or_else(|| identity(self.layout().num_feeds()))
    }

    /// Draws users and rain for `drop` from its own random streams.
    pub fn channel(&self, drop: usize) -> Result<DropChannel> {
        let seed = drop_seed(self.config.run.seed, drop as u64);
        let users = place_users(&self.geometry, &mut stream_rng(seed, Stream::Users))?;
        let attenuation = sample_rain(
            &self.config.rain_model(),
            users.len(),
            &mut stream_rng(seed, Stream::Rain),
        )?;
        let w = user_link_matrix(&self.geometry, &users)?;
        let user_link = ChannelMatrix::new(apply_fading(&w, &attenuation)?, self.layout().clone())?;
        Ok(DropChannel {
            drop,
            seed,
            users,
            attenuation,
            user_link,
        })
    }

    /// Physical channel after the feeder link.
    pub fn true_channel(&self, ch: &DropChannel) -> Result<ChannelMatrix> {
        match &self.feeder {
            None => Ok(ch.user_link.clone()),
            Some(f) => ch.user_link.with_entries(apply_feeder(ch.user_link.entries(), f)?),
        }
    }

    /// Channel handed to the precoder: feeder coupling if known, then CSI impairments.
    pub fn precoder_channel(&self, ch: &DropChannel, physical: &ChannelMatrix) -> Result<ChannelMatrix> {
        let base = if self.config.feeder.known_at_gateway {
            physical.entries().clone()
        } else {
            ch.user_link.entries().clone()
        };
        physical.with_entries(self.config.csi_impairment().apply(&base)?)
    }

    pub fn precoder(&self, ch: &DropChannel, scheme: CooperationScheme) -> Result<PrecoderSet> {
        let physical = self.true_channel(ch)?;
        let seen = self.precoder_channel(ch, &physical)?;
        let inner = self.config.inner_stage(scheme, self.layout().num_gateways());
        scheme_precoder(scheme, &seen, self.config.power_w(), inner)
    }

    /// Runs the configured scheme on `drop`.
    pub fn run_drop(&self, drop: usize) -> Result<DropResult> {
        self.run_drop_with(drop, self.config.cooperation)
    }

    pub fn run_drop_with(&self, drop: usize, scheme: CooperationScheme) -> Result<DropResult> {
        let ch = self.channel(drop)?;
        self.evaluate(&ch, scheme)
    }

    /// Precodes and scores an already drawn channel.
    pub fn evaluate(&self, ch: &DropChannel, scheme: CooperationScheme) -> Result<DropResult> {
        let layout = self.layout();
        let power = self.config.power_w();
        let pair = smse(ch.user_link.entries(), &self.feeder(), layout.num_gateways(), power)?;
        let mut result = DropResult {
            drop: ch.drop,
            seed: ch.seed,
            scheme,
            users: Vec::new(),
            smse_no_interference: pair.smse_no_interference,
            smse_interference: pair.smse_interference,
            overhead: overhead_for_layout(scheme, layout),
            leakage: Vec::new(),
            excluded: None,
        };
        let physical = self.true_channel(ch)?;
        let set = match self.precoder(ch, scheme) {
            Ok(s) => s,
            Err(e @ (Error::Singular { .. } | Error::Degenerate(_))) => {
                result.excluded = Some(e.to_string());
                return Ok(result);
            }
            Err(e) => return Err(e),
        };
        let s = sinr(physical.entries(), &set.total)?;
        let clusters = layout.beam_clusters();
        result.users = s
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let db = crate::linalg::to_db(x);
                UserResult {
                    user: k,
                    beam: ch.users[k].beam,
                    cluster: clusters[k],
                    sinr: x,
                    sinr_db: db,
                    efficiency_bps: self.table.efficiency(db),
                }
            })
            .collect();
        if set.structure != Structure::SingleGateway {
            result.leakage = set
                .gateways
                .iter()
                .map(|gp| leakage_ratio(&physical, gp.gateway, &gp.block))
                .collect();
        }
        Ok(result)
    }

    /// All configured drops of `scheme`, in parallel, returned in drop order.
    pub fn run_scheme(&self, scheme: CooperationScheme) -> Result<Vec<DropResult>> {
        (0..self.config.run.drops)
            .into_par_iter()
            .map(|d| self.run_drop_with(d, scheme))
            .collect()
    }
}

/// `run_drop` on a configuration without reusing state.
pub fn run_drop(config: &ExperimentConfig, drop: usize) -> Result<DropResult> {
    Experiment::new(config.clone())?.run_drop(drop)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedDrop {
    pub drop: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub power_dbw: f64,
    pub drops_requested: usize,
    pub drops_included: usize,
    pub excluded: Vec<ExcludedDrop>,
    /// Absent when every drop was excluded.
    pub efficiency: Option<EfficiencySummary>,
    pub mean_sinr_db: Option<f64>,
    pub mean_smse_no_interference: f64,
    pub mean_smse_interference: f64,
    /// SMSE values are `Σ 1/(G/P + λ_i)` without a leading factor.
    pub smse_prefactor: String,
    pub overhead: Overhead,
}

pub fn summarize(results: &[DropResult], scheme: CooperationScheme, power_dbw: f64, overhead: Overhead) -> Result<RunSummary> {
    let included: Vec<&DropResult> = results.iter().filter(|r| !r.is_excluded()).collect();
    let excluded = results
        .iter()
        .filter_map(|r| {
            r.excluded.as_ref().map(|reason| ExcludedDrop {
                drop: r.drop,
                reason: reason.clone(),
            })
        })
        .collect();
    let efficiency = if included.is_empty() {
        None
    } else {
        let per_drop: Vec<Vec<f64>> = included.iter().map(|r| r.efficiencies()).collect();
        Some(spectral_efficiency_summary(&per_drop)?)
    };
    let sinrs: Vec<f64> = included.iter().flat_map(|r| r.users.iter().map(|u| u.sinr_db)).collect();
    let mean = |v: &[f64]| stable_sum(v) / v.len().max(1) as f64;
    let smse_a: Vec<f64> = results.iter().map(|r| r.smse_no_interference).collect();
    let smse_b: Vec<f64> = results.iter().map(|r| r.smse_interference).collect();
    Ok(RunSummary {
        scenario: scenario_label(scheme),
        power_dbw,
        drops_requested: results.len(),
        drops_included: included.len(),
        excluded,
        efficiency,
        mean_sinr_db: (!sinrs.is_empty()).then(|| mean(&sinrs)),
        mean_smse_no_interference: mean(&smse_a),
        mean_smse_interference: mean(&smse_b),
        smse_prefactor: "none".into(),
        overhead,
    })
}

/// Scenario number when the scheme has one, otherwise its short name.
pub fn scenario_label(scheme: CooperationScheme) -> String {
    scheme.scenario().map_or_else(|| scheme.to_string(), |id| id.to_string())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: Vec<DropResult>,
    pub summary: RunSummary,
}

/// Runs the configured scheme over all drops.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let exp = Experiment::new(config.clone())?;
    let scheme = config.cooperation;
    let results = exp.run_scheme(scheme)?;
    let summary = summarize(&results, scheme, config.run.power_dbw, overhead_for_layout(scheme, exp.layout()))?;
    Ok(RunOutput { results, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sweep: String,
    pub scheme: CooperationScheme,
    pub power_dbw: f64,
    pub num_interferers: usize,
    pub rho: f64,
    pub summary: RunSummary,
}

fn sweep_point(config: &ExperimentConfig, sweep: &str, scheme: CooperationScheme) -> Result<SweepPoint> {
    let exp = Experiment::new(config.clone())?;
    let results = exp.run_scheme(scheme)?;
    Ok(SweepPoint {
        sweep: sweep.into(),
        scheme,
        power_dbw: config.run.power_dbw,
        num_interferers: config.feeder.num_interferers,
        rho: config.feeder.rho,
        summary: summarize(&results, scheme, config.run.power_dbw, overhead_for_layout(scheme, exp.layout()))?,
    })
}

/// One summary per (power, scheme); drops are paired across points.
pub fn sweep_power(config: &ExperimentConfig, powers_dbw: &[f64], schemes: &[CooperationScheme]) -> Result<Vec<SweepPoint>> {
    if powers_dbw.is_empty() || schemes.is_empty() {
        return Err(Error::Config("power sweep needs at least one power and one scheme".into()));
    }
    if powers_dbw.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("power list must be strictly ascending".into()));
    }
    let mut out = Vec::new();
    for &p in powers_dbw {
        let mut cfg = config.clone();
        cfg.run.power_dbw = p;
        for &s in schemes {
            out.push(sweep_point(&cfg, "power", s)?);
        }
    }
    Ok(out)
}

/// One summary per (interferer count, scheme) at the configured `ρ` and power.
pub fn sweep_interferers(config: &ExperimentConfig, counts: &[usize], schemes: &[CooperationScheme]) -> Result<Vec<SweepPoint>> {
    if counts.is_empty() || schemes.is_empty() {
        return Err(Error::Config("interferer sweep needs at least one count and one scheme".into()));
    }
    let mut out = Vec::new();
    for &m in counts {
        let mut cfg = config.clone();
        cfg.feeder.num_interferers = m;
        for &s in schemes {
            out.push(sweep_point(&cfg, "interferers", s)?);
        }
    }
    Ok(out)
}

/// `0..=G−1` for the configured layout.
pub fn all_interferer_counts(config: &ExperimentConfig) -> Result<Vec<usize>> {
    let g = config.grid()?.layout.num_gateways();
    Ok((0..g).collect())
}
