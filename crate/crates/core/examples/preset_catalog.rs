//! Lists every built-in scenario with its sweep size and prints one in
//! configuration-file form.
//!
//! cargo run --example preset_catalog [name]

use accelrad::scenario::{preset, serialize, PRESET_NAMES};

fn main() -> accelrad::Result<()> {
    for name in PRESET_NAMES {
        let s = preset(name)?;
        let c = &s.config;
        println!(
            "{name:<6} points {:>2}  κ {:<6} g {:?}  start {}  window {} periods",
            s.sweep.len(),
            c.kappa,
            c.g,
            s.initial_state,
            s.t_final
        );
    }
    let chosen = std::env::args().nth(1).unwrap_or_else(|| "fig2a".into());
    println!("\n# {chosen}\n{}", serialize(&preset(&chosen)?));
    Ok(())
}
