//! Second-order amplitudes from quadrature, from the truncated Bessel
//! series and from the resonant closed form, side by side with the full
//! closed-system simulation.
//!
//! cargo run --release --example perturbative_checks

use accelrad::analytics::{
    bessel_j, compare_series, perturbative_concurrence, resonant_concurrence, PerturbativeInput,
};
use accelrad::dynamics::{evolve, IntegratorOptions};
use accelrad::model::{ModulationProfile, SystemConfig};
use accelrad::observables::trace_observables;
use accelrad::scenario::InitialState;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

fn main() -> accelrad::Result<()> {
    let g = 0.02;
    println!("J2(π/2) = {:.12}", bessel_j(2, FRAC_PI_2));
    println!("J2(π/4) = {:.12}", bessel_j(2, FRAC_PI_4));
    println!("J1(π/2) = {:.12}\n", bessel_j(1, FRAC_PI_2));

    let cfg = SystemConfig {
        g: [g, g],
        modulation: ModulationProfile::entanglement_pair(1.0, 1.0),
        ..SystemConfig::default()
    };
    let rho0 = InitialState::Gg0.density_matrix(&cfg)?;
    let times = [5.0, 10.0, 15.0];
    let res = evolve(&cfg, &rho0, cfg.time_to_periods(15.0), &IntegratorOptions::default(), 4)?;
    let sim = trace_observables(&res)?;

    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "gT", "C sim", "C quad", "C closed", "|X| quad", "|X| series", "ratio"
    );
    for (k, t) in times.iter().enumerate() {
        let input = PerturbativeInput::entanglement(g, 1.0, 0.0, 1.0, *t);
        let quad = perturbative_concurrence(&input)?;
        let cmp = compare_series(&input)?;
        println!(
            "{:>5.2} {:>12.6} {:>12.6} {:>12.6} {:>12.4e} {:>12.4e} {:>8.3}",
            g * t,
            sim.concurrence[k + 1],
            quad.concurrence(),
            resonant_concurrence(g, *t),
            cmp.x_numeric.norm(),
            cmp.x_series.norm(),
            cmp.x_ratio(),
        );
    }
    Ok(())
}
