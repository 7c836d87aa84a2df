//! Adaptive Dormand–Prince against fixed-step RK4 and against a product of
//! exact superoperator exponentials on a small truncation.
//!
//! cargo run --release --example integrator_oracle

use std::time::Instant;

use accelrad::dynamics::{evolve, evolve_piecewise_exact, IntegratorOptions};
use accelrad::scenario::{preset, InitialState};

fn main() -> accelrad::Result<()> {
    let mut cfg = preset("fig2a")?.config.with_fock(3);
    cfg.modulation[0].omega_d = 1.0;
    cfg.modulation[1].omega_d = 1.0;
    let rho0 = InitialState::Gg0.density_matrix(&cfg)?;
    let periods = 5.0;

    let start = Instant::now();
    let adaptive = evolve(&cfg, &rho0, periods, &IntegratorOptions::default(), 2)?;
    let t_rk45 = start.elapsed();
    let d = adaptive.diagnostics;
    println!(
        "RK45: {} accepted / {} rejected steps, trace drift {:.1e}, {:?}",
        d.accepted_steps, d.rejected_steps, d.max_trace_drift, t_rk45
    );

    let start = Instant::now();
    let exact = evolve_piecewise_exact(&cfg, &rho0, periods, 1000)?;
    println!("1000 exact slices: {:?}", start.elapsed());
    let diff = adaptive.final_state().as_operator().max_abs_diff(exact.as_operator());
    println!("max |ρ_RK45 - ρ_exact| = {diff:.2e}");

    for dt in [0.2, 0.1, 0.05] {
        let rk4 = evolve(&cfg, &rho0, periods, &IntegratorOptions::rk4(dt), 2)?;
        let err = rk4.final_state().as_operator().max_abs_diff(exact.as_operator());
        println!("RK4 dt = {dt:<5} max diff = {err:.2e}");
    }
    Ok(())
}
