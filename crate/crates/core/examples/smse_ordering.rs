//! The randomized SMSE-ordering and interlacing suites.

use mgw_precoding::harness::verify::{interlacing_suite, ordering_suite};

fn main() -> mgw_precoding::Result<()> {
    let t = ordering_suite(200, 1)?;
    println!("{}/{} instances with SMSE_interference >= SMSE", t.holding, t.instances);
    println!("worst margin {:.3e}", t.worst_margin);
    for o in t.failures().take(3) {
        println!("  instance {}: K={} G={} rho={:.2} m={}", o.index, o.num_beams, o.num_gateways, o.rho, o.num_interferers);
    }
    let i = interlacing_suite(100, 1)?;
    println!("interlacing: {} of {} chains violated", i.failures, i.checks);
    Ok(())
}
