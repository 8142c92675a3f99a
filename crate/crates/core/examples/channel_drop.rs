//! Draws one desk-scale drop and prints what the precoder will see.

use mgw_precoding::channel::FeedPattern;
use mgw_precoding::harness::{Experiment, ExperimentConfig};
use mgw_precoding::linalg::to_db;

fn main() -> mgw_precoding::Result<()> {
    let cfg = ExperimentConfig::default();
    let exp = Experiment::new(cfg.clone())?;
    let layout = exp.layout();
    println!(
        "{} beams, {} feeds, {} gateways",
        layout.num_beams(),
        layout.num_feeds(),
        layout.num_gateways()
    );
    for g in 0..layout.num_gateways() {
        println!("  gateway {g}: beams {:?}, feeds {:?}", layout.beams_of_cluster(g), layout.feeds_of_gateway(g));
    }

    let pattern = FeedPattern::new(cfg.pattern.peak_gain_dbi, cfg.pattern.theta_3db_deg);
    for deg in [0.0, 0.1, 0.2, 0.4] {
        println!("  pattern at {deg:.1} deg: {:6.2} dBi", pattern.gain_dbi(f64::to_radians(deg)));
    }

    let ch = exp.channel(0)?;
    let h = ch.user_link.entries();
    for k in 0..3 {
        let row = h.row(k);
        let best = row.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        println!(
            "user {k}: rain {:.2} dB, strongest feed {:.1} dB above noise",
            to_db(ch.attenuation[k]),
            to_db(best)
        );
    }
    Ok(())
}
