//! Seeded Monte Carlo run and a power sweep, written to a temporary directory.

use mgw_precoding::cooperation::CooperationScheme;
use mgw_precoding::harness::io::{write_json, write_results_csv, write_sweep_csv};
use mgw_precoding::harness::{run, sweep_power, ExperimentConfig};

fn main() -> mgw_precoding::Result<()> {
    let mut cfg = ExperimentConfig::from_toml_str("cooperation = \"gcm\"\n[run]\ndrops = 40\nseed = 7\n")?;
    let out = run(&cfg)?;
    let dir = std::env::temp_dir().join("mgw-example");
    std::fs::create_dir_all(&dir)?;
    write_results_csv(std::fs::File::create(dir.join("results.csv"))?, &out.results)?;
    write_json(&dir.join("summary.json"), &out.summary)?;
    if let Some(e) = out.summary.efficiency {
        println!("mean {:.3}, p5 {:.3}, p95 {:.3}", e.per_user.mean, e.per_user.p5, e.per_user.p95);
    }

    cfg.run.drops = 20;
    let points = sweep_power(
        &cfg,
        &[10.0, 20.0, 30.0],
        &[CooperationScheme::Icm, CooperationScheme::SingleGatewayRef],
    )?;
    write_sweep_csv(std::fs::File::create(dir.join("sweep.csv"))?, &points)?;
    for p in &points {
        let mean = p.summary.efficiency.map_or(f64::NAN, |e| e.per_user.mean);
        println!("{:>4} {:>5.1} dBW {mean:.3}", p.scheme.to_string(), p.power_dbw);
    }
    println!("files in {}", dir.display());
    Ok(())
}
