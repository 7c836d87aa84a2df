//! Builds a scenario from configuration text, runs its sweep and prints the
//! files written. The same text can be saved and passed to
//! `accelrad run --config`.
//!
//! cargo run --release --example custom_scenario

use accelrad::scenario::{parse, run, serialize, RunOptions};

const CONFIG: &str = "\
scenario.name = detuned_pair
scenario.initial_state = gg0
scenario.t_final = 5
scenario.samples = 51
system.n_fock = 6
system.omega_q.1 = 1.05
system.omega_q.2 = 1.05
system.g.1 = 0.03
system.g.2 = 0.03
system.kappa = 0.01
modulation.1.enabled = true
modulation.1.f0 = pi/4
modulation.1.delta_f = pi/4
modulation.2.enabled = true
modulation.2.f0 = 3*pi/4
modulation.2.delta_f = pi/4

# common drive swept together
sweep.drive.fields = modulation.1.omega_d, modulation.2.omega_d
sweep.drive.values = 0.9, 0.9 | 1.0, 1.0 | 1.1, 1.1
";

fn main() -> accelrad::Result<()> {
    let spec = parse(CONFIG)?;
    println!("normalized config:\n{}", serialize(&spec));
    let dir = std::env::temp_dir().join("accelrad_custom_scenario");
    let report = run(&spec, &RunOptions::new(&dir))?;
    for p in &report.points {
        let trace = p.trace.as_ref().expect("point succeeded");
        let c_max = trace.concurrence.iter().copied().fold(0.0, f64::max);
        println!("{:?}: C_max = {c_max:.5} [{}]", p.coordinates, p.status.as_str());
    }
    for path in report.paths() {
        println!("{}", path.display());
    }
    Ok(())
}
