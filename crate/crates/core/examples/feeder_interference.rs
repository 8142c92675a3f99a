//! Feeder-link coupling: the structure of `H_f` and what it does to SMSE and efficiency.

use mgw_precoding::harness::{Experiment, ExperimentConfig};
use mgw_precoding::impairments::{feeder_matrix, FeederLinkModel};
use mgw_precoding::metrics::smse;

fn main() -> mgw_precoding::Result<()> {
    let base = ExperimentConfig::default();
    let exp = Experiment::new(base.clone())?;
    let layout = exp.layout().clone();
    let ch = exp.channel(0)?;

    for m in 0..layout.num_gateways() {
        let hf = feeder_matrix(&FeederLinkModel::new(1.0, m)?, &layout)?;
        let pair = smse(ch.user_link.entries(), &hf, layout.num_gateways(), base.power_w())?;
        let mut cfg = base.clone();
        cfg.feeder.rho = 1.0;
        cfg.feeder.num_interferers = m;
        cfg.run.drops = 30;
        let results = Experiment::new(cfg)?.run_scheme(base.cooperation)?;
        let mean = results.iter().map(|r| r.sum_efficiency()).sum::<f64>() / (30 * layout.num_beams()) as f64;
        println!(
            "m={m}: SMSE {:.4} -> {:.4}, mean efficiency {mean:.3}",
            pair.smse_no_interference, pair.smse_interference
        );
    }
    Ok(())
}
