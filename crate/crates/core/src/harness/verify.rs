//! Randomized property suites: the SMSE ordering under feeder interference, singular-value
//! interlacing, row-selection contraction, and precoder invariants on simulated drops.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::ClusterLayout;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::Experiment;
use crate::harness::rng::{drop_seed, stream_rng, Stream};
use crate::impairments::{feeder_matrix, FeederLinkModel};
use crate::linalg::{condition_number, energy, fro, identity, singular_values, CMatrix, C64};
use crate::metrics::{interlacing_violation, selection_contracts, check_smse_ordering};
use crate::precoder::{
    full_cooperation, inner_zf, null_projector, regularize, virtual_channel, InnerStage,
};

/// Matrix of independent `CN(0, 1)` entries.
pub fn complex_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// One randomized SMSE comparison.
#[derive(Debug, Clone)]
pub struct OrderingInstance {
    pub layout: ClusterLayout,
    pub user_link: CMatrix,
    pub feeder: CMatrix,
    pub rho: f64,
    pub num_interferers: usize,
    pub power: f64,
}

/// Instance `index` of the suite seeded by `seed`: `K ≤ 20`, `G ≤ 4`, `K_g ≤ N_g ≤ 2K_g`,
/// power in `[0, 40]` dBW. Every tenth instance has `ρ = 0`.
pub fn ordering_instance(seed: u64, index: usize) -> Result<OrderingInstance> {
    let mut rng = stream_rng(drop_seed(seed, index as u64), Stream::Instance);
    let g = rng.random_range(1..=4usize);
    let k_g = rng.random_range(1..=20 / g);
    let n_g = k_g + rng.random_range(0..=k_g);
    let layout = ClusterLayout::uniform(g, k_g, n_g)?;
    let rho = if index % 10 == 0 { 0.0 } else { rng.random::<f64>() };
    let num_interferers = rng.random_range(0..g);
    let power = 10f64.powf(rng.random_range(0.0..4.0));
    let user_link = complex_gaussian(&mut rng, layout.num_beams(), layout.num_feeds());
    let feeder = feeder_matrix(&FeederLinkModel::new(rho, num_interferers)?, &layout)?;
    Ok(OrderingInstance {
        layout,
        user_link,
        feeder,
        rho,
        num_interferers,
        power,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingOutcome {
    pub index: usize,
    pub num_beams: usize,
    pub num_gateways: usize,
    pub rho: f64,
    pub num_interferers: usize,
    pub holds: bool,
    pub margin: f64,
    pub relative_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingSuite {
    pub instances: usize,
    pub holding: usize,
    pub rho_zero_instances: usize,
    /// Largest `|margin| / SMSE` over the `ρ = 0` instances.
    pub rho_zero_max_relative: f64,
    pub worst_margin: f64,
    pub outcomes: Vec<OrderingOutcome>,
}

impl OrderingSuite {
    pub fn all_hold(&self) -> bool {
        self.holding == self.instances
    }

    pub fn failures(&self) -> impl Iterator<Item = &OrderingOutcome> {
        self.outcomes.iter().filter(|o| !o.holds)
    }
}

pub fn ordering_suite(instances: usize, seed: u64) -> Result<OrderingSuite> {
    let mut outcomes = Vec::with_capacity(instances);
    for i in 0..instances {
        let inst = ordering_instance(seed, i)?;
        let g = inst.layout.num_gateways();
        let check = check_smse_ordering(&inst.user_link, &inst.feeder, g, inst.power)?;
        outcomes.push(OrderingOutcome {
            index: i,
            num_beams: inst.layout.num_beams(),
            num_gateways: g,
            rho: inst.rho,
            num_interferers: inst.num_interferers,
            holds: check.holds,
            margin: check.margin,
            relative_margin: check.margin / check.pair.smse_no_interference,
        });
    }
    let zero: Vec<&OrderingOutcome> = outcomes.iter().filter(|o| o.rho == 0.0).collect();
    Ok(OrderingSuite {
        instances,
        holding: outcomes.iter().filter(|o| o.holds).count(),
        rho_zero_instances: zero.len(),
        rho_zero_max_relative: zero.iter().map(|o| o.relative_margin.abs()).fold(0.0, f64::max),
        worst_margin: outcomes.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min),
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingSuite {
    pub matrices: usize,
    pub checks: usize,
    pub failures: usize,
    /// Largest violation divided by `σ₁`; non-positive when every chain holds.
    pub worst_relative_violation: f64,
}

/// Random tall complex matrices (up to 12 rows), every admissible `r`.
pub fn interlacing_suite(matrices: usize, seed: u64) -> Result<InterlacingSuite> {
    let mut checks = 0;
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..matrices {
        let mut rng = stream_rng(drop_seed(seed ^ 0x1a7e, i as u64), Stream::Instance);
        let rows = rng.random_range(2..=12usize);
        let cols = rng.random_range(2..=rows);
        let d = complex_gaussian(&mut rng, rows, cols);
        let sigma1 = singular_values(&d)[0];
        for r in 1..cols {
            let v = interlacing_violation(&d, r)? / sigma1;
            checks += 1;
            if v > 1e-10 {
                failures += 1;
            }
            worst = worst.max(v);
        }
    }
    Ok(InterlacingSuite {
        matrices,
        checks,
        failures,
        worst_relative_violation: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSuite {
    pub matrices: usize,
    pub failures: usize,
}

/// `σ_i(S·G) ≤ σ_i(G)` for random `G` and random 0/1 row selections.
pub fn selection_suite(matrices: usize, seed: u64) -> Result<SelectionSuite> {
    let mut failures = 0;
    for i in 0..matrices {
        let mut rng = stream_rng(drop_seed(seed ^ 0x5e1e, i as u64), Stream::Instance);
        let rows = rng.random_range(1..=16usize);
        let cols = rng.random_range(1..=16usize);
        let g = complex_gaussian(&mut rng, rows, cols);
        let keep: Vec<bool> = (0..rows).map(|_| rng.random::<bool>()).collect();
        if !selection_contracts(&g, &keep)? {
            failures += 1;
        }
    }
    Ok(SelectionSuite { matrices, failures })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSuite {
    pub drops: usize,
    /// Largest `‖W̃_g V_g⁰‖ / ‖W̃_g‖`.
    pub worst_null_residual: f64,
    /// Largest `‖H_g^eq W_g − I‖` over gateways with condition number below `1e10`.
    pub worst_zf_residual: f64,
    pub zf_checked: usize,
    /// Largest relative error of `Tr(T_g^H T_g) = P/G`.
    pub worst_gateway_power: f64,
    /// Largest relative error of `Tr(T^H T) = P`.
    pub worst_total_power: f64,
    pub excluded: usize,
}

impl InvariantSuite {
    pub fn passes(&self) -> bool {
        self.worst_null_residual <= 1e-9
            && self.worst_zf_residual <= 1e-8
            && self.worst_gateway_power <= 1e-10
            && self.worst_total_power <= 1e-10
    }
}

/// Null-space exactness, ZF residual and power budgets over `drops` simulated drops.
pub fn invariant_suite(config: &ExperimentConfig, drops: usize) -> Result<InvariantSuite> {
    let exp = Experiment::new(config.clone())?;
    let layout = exp.layout().clone();
    let g_count = layout.num_gateways();
    let power = config.power_w();
    let mut s = InvariantSuite {
        drops,
        worst_null_residual: 0.0,
        worst_zf_residual: 0.0,
        zf_checked: 0,
        worst_gateway_power: 0.0,
        worst_total_power: 0.0,
        excluded: 0,
    };
    for d in 0..drops {
        let ch = exp.channel(d)?;
        let h = &ch.user_link;
        for g in 0..g_count {
            let h_g = h.gateway_block(g);
            let own = layout.beams_of_cluster(g);
            let reg = regularize(&h_g, own, g_count, power)?;
            let w_tilde = reg.out_of_cluster();
            let null = null_projector(&w_tilde, h_g.nrows(), own.len())?;
            let scale = fro(&w_tilde);
            if scale > 0.0 {
                s.worst_null_residual = s.worst_null_residual.max(fro(&(&w_tilde * &null.basis)) / scale);
            }
            let h_eq = virtual_channel(&reg.own(), &null.basis)?;
            if condition_number(&h_eq) < 1e10 {
                let w = inner_zf(&h_eq)?;
                let k_g = own.len();
                s.worst_zf_residual = s.worst_zf_residual.max(fro(&(&h_eq * w - identity(k_g))));
                s.zf_checked += 1;
            }
        }
        for inner in [InnerStage::Zf, config.inner_stage(config.cooperation, g_count)] {
            match full_cooperation(h, power, inner) {
                Ok(set) => {
                    for gp in &set.gateways {
                        let target = power / g_count as f64;
                        s.worst_gateway_power =
                            s.worst_gateway_power.max((energy(&gp.block) - target).abs() / target);
                    }
                    s.worst_total_power = s.worst_total_power.max((energy(&set.total) - power).abs() / power);
                }
                Err(_) => s.excluded += 1,
            }
        }
    }
    Ok(s)
}
