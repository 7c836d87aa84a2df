//! Both qubits excited (or both in |+>) and both shaken at twice the
//! cavity frequency, compared with a single static coupled qubit.
//!
//! cargo run --release --example two_atom_subradiance

use accelrad::scenario::runner::{simulate, RunOptions};
use accelrad::scenario::preset;

fn main() -> accelrad::Result<()> {
    let spec = preset("s3")?.with_overrides(None, Some(10.0), Some(101));
    let opts = RunOptions::new(std::env::temp_dir());
    println!("{:>7} {:>5} {:>10} {:>9} {:>9} {:>9}", "κ", "start", "motion", "p_q1", "p_q2", "C");
    for point in spec.points()? {
        let s = &point.spec;
        let (trace, _) = simulate(s, &opts.integrator)?;
        let k = trace.index_at(10.0);
        let motion = if s.config.g[0] == 0.0 { "reference" } else { "moving" };
        println!(
            "{:>7} {:>5} {:>10} {:>9.5} {:>9.5} {:>9.5}",
            s.config.kappa, s.initial_state, motion, trace.p_q1[k], trace.p_q2[k], trace.concurrence[k]
        );
    }
    Ok(())
}
