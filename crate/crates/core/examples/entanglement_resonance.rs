//! Two qubits a quarter wavelength apart, both starting in the ground
//! state. Shaking them at the cavity frequency creates entanglement from
//! the vacuum; leaving them still does not.
//!
//! cargo run --release --example entanglement_resonance [t_final_periods]

use accelrad::scenario::runner::RunOptions;
use accelrad::scenario::{preset, sweep_concurrence_map};

fn main() -> accelrad::Result<()> {
    let t_final: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("t_final must be a number"))
        .unwrap_or(10.0);
    let dir = std::env::temp_dir().join("accelrad_entanglement_resonance");
    let mut opts = RunOptions::new(&dir);
    opts.fock_check = false;

    for name in ["fig2a", "fig2b"] {
        let spec = preset(name)?.with_overrides(None, Some(t_final), Some(t_final as usize * 10 + 1));
        let drives = [0.0, 0.5, 1.0, 2.0];
        let map = sweep_concurrence_map(&spec, &drives, &drives, t_final, &opts)?;
        println!("{name}: κ = {}, window {t_final} periods", spec.config.kappa);
        println!("  ω_d1 \\ ω_d2 {}", drives.map(|d| format!("{d:>9}")).join(""));
        for d1 in drives {
            let row: Vec<String> = drives
                .iter()
                .map(|&d2| format!("{:>9.5}", map.cell(d1, d2).unwrap().c_max))
                .collect();
            println!("  {d1:>11} {}", row.join(""));
        }
        println!("  map written to {}\n", map.path.display());
    }
    Ok(())
}
