//! Full-cooperation precoder on one drop, ZF against MMSE inner stages.

use mgw_precoding::harness::{Experiment, ExperimentConfig};
use mgw_precoding::linalg::energy;
use mgw_precoding::metrics::{modcod_efficiency, sinr_db, stable_sum};
use mgw_precoding::precoder::{full_cooperation, leakage_ratio, Flavor, InnerStage, MmseRegularization};

fn main() -> mgw_precoding::Result<()> {
    let cfg = ExperimentConfig::default();
    let exp = Experiment::new(cfg.clone())?;
    let ch = exp.channel(0)?;
    let g_count = exp.layout().num_gateways();
    let power = cfg.power_w();

    for flavor in [Flavor::Zf, Flavor::Mmse] {
        let inner = InnerStage::new(flavor, MmseRegularization::Standard, g_count, power);
        let set = full_cooperation(&ch.user_link, power, inner)?;
        let s = sinr_db(ch.user_link.entries(), &set.total)?;
        let eff: Vec<f64> = s.iter().map(|&x| modcod_efficiency(x)).collect();
        println!("{flavor:?}: Tr(T^H T) = {:.3} W (budget {power:.0} W)", energy(&set.total));
        for (g, gp) in set.gateways.iter().enumerate() {
            println!(
                "  gateway {g}: beta {:.3e}, leakage {:.4}",
                gp.beta,
                leakage_ratio(&ch.user_link, g, &gp.block)
            );
        }
        println!("  sum efficiency {:.3} bit/symbol", stable_sum(&eff));
    }
    Ok(())
}
