//! Quantized feedback with the 31-feed visibility limit.

use mgw_precoding::cooperation::CooperationScheme;
use mgw_precoding::harness::{Experiment, ExperimentConfig};
use mgw_precoding::impairments::{dequantize_entry, quantize_entry, QuantizerSpec};
use mgw_precoding::linalg::c;

fn main() -> mgw_precoding::Result<()> {
    let spec = QuantizerSpec::default();
    let z = c(0.123456789, -0.987654321);
    let q = quantize_entry(z, &spec);
    let back = dequantize_entry(q, &spec);
    println!("{z:.9} -> |{}|, /{} -> {back:.9}", q.magnitude, q.phase);

    let mut cfg = ExperimentConfig::default();
    cfg.run.drops = 50;
    for scheme in [CooperationScheme::Lmc, CooperationScheme::Gcm] {
        for quantized in [false, true] {
            cfg.csi.quantized = quantized;
            cfg.csi.max_feeds = if quantized { 31 } else { 0 };
            let exp = Experiment::new(cfg.clone())?;
            let r = exp.run_scheme(scheme)?;
            let mean = r.iter().map(|d| d.sum_efficiency()).sum::<f64>() / (50 * exp.layout().num_beams()) as f64;
            println!("{scheme}: quantized={quantized:<5} mean efficiency {mean:.4}");
        }
    }
    Ok(())
}
