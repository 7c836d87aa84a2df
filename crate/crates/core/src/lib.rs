//! Two qubits with time-modulated coupling to a single cavity mode:
//! Lindblad dynamics, two-qubit concurrence, perturbative Bessel analytics
//! and scenario sweeps.

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod operators;
pub mod scenario;

pub use error::{Error, Result};
