//! Every cooperation scheme on the same drops, with its signalling cost.

use mgw_precoding::cooperation::{overhead_for_layout, CooperationScheme};
use mgw_precoding::harness::{Experiment, ExperimentConfig, Preset};

fn main() -> mgw_precoding::Result<()> {
    let mut cfg = ExperimentConfig::preset(Preset::Regional);
    cfg.run.drops = 20;
    let exp = Experiment::new(cfg)?;
    let schemes = [
        CooperationScheme::Icm,
        CooperationScheme::GroupCollab { group_size: 4 },
        CooperationScheme::Lmc,
        CooperationScheme::Gcm,
        CooperationScheme::SingleGatewayRef,
    ];
    println!("{:>5} {:>10} {:>10}", "", "bit/sym", "overhead");
    for s in schemes {
        let results = exp.run_scheme(s)?;
        let kept: Vec<_> = results.iter().filter(|r| !r.is_excluded()).collect();
        let users: usize = kept.iter().map(|r| r.users.len()).sum();
        let mean = kept.iter().map(|r| r.sum_efficiency()).sum::<f64>() / users as f64;
        let o = overhead_for_layout(s, exp.layout());
        println!("{:>5} {mean:>10.3} {:>10}", s.to_string(), o.total);
    }
    Ok(())
}
