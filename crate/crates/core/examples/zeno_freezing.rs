//! One excited qubit in a leaky cavity. Held at the antinode it decays
//! through the cavity; swept rapidly from mirror to mirror it barely decays
//! at all, tracking only its intrinsic relaxation.
//!
//! cargo run --release --example zeno_freezing

use accelrad::scenario::runner::{simulate, RunOptions};
use accelrad::scenario::preset;

fn main() -> accelrad::Result<()> {
    let spec = preset("fig3b")?.with_overrides(None, Some(10.0), Some(101));
    let opts = RunOptions::new(std::env::temp_dir());
    let gamma = spec.config.gamma[1];
    println!("κ = {}, g₂ = {}, Γ = {gamma}", spec.config.kappa, spec.config.g[1]);
    println!("{:>6} {:>10} {:>10}", "ω_d2", "p_q2(5)", "p_q2(10)");
    for point in spec.points()? {
        let (trace, _) = simulate(&point.spec, &opts.integrator)?;
        println!(
            "{:>6} {:>10.5} {:>10.5}",
            point.spec.config.modulation[1].omega_d,
            trace.p_q2[trace.index_at(5.0)],
            trace.p_q2[trace.index_at(10.0)],
        );
    }
    let t = spec.config.periods_to_time(5.0);
    println!("intrinsic decay only: exp(-Γt) at 5 periods = {:.5}", (-gamma * t).exp());
    Ok(())
}
