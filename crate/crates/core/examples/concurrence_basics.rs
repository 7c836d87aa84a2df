//! Wootters concurrence on textbook states, and a Bell pair sharing the
//! cavity vacuum.
//!
//! cargo run --example concurrence_basics

use accelrad::observables::{concurrence, qubit_state};
use accelrad::operators::{basis_ket, kron_ket, DensityMatrix, OperatorMatrix, C64};

fn main() -> accelrad::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);

    let product = DensityMatrix::from_pure(&[2, 2], &basis_ket(&[2, 2], &[0, 1])?)?;
    let psi_plus = vec![z, r(s), r(s), z];
    let bell = DensityMatrix::from_pure(&[2, 2], &psi_plus)?;
    println!("|g e>            C = {:.6}", concurrence(&product)?);
    println!("(|ge>+|eg>)/√2   C = {:.6}", concurrence(&bell)?);

    // Werner family p|Ψ+><Ψ+| + (1-p) I/4: C = max(0, (3p-1)/2).
    println!("\nWerner states");
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let mixed = &(p * bell.as_operator())
            + &((1.0 - p) / 4.0 * &OperatorMatrix::identity(&[2, 2]));
        let c = concurrence(&DensityMatrix::new(mixed)?)?;
        println!("  p = {p:.3}  C = {c:.6}  expected {:.6}", ((3.0 * p - 1.0) / 2.0).max(0.0));
    }

    // Tracing out an empty cavity leaves the Bell pair intact.
    let full = kron_ket(&psi_plus, &basis_ket(&[4], &[0])?);
    let rho = DensityMatrix::from_pure(&[2, 2, 4], &full)?;
    println!("\nBell ⊗ |0>, cavity traced out: C = {:.6}", concurrence(&qubit_state(&rho)?)?);
    Ok(())
}
