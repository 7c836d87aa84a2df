//! Quantities read off a state: two-qubit concurrence, qubit excitation
//! probabilities, mean photon number and purity.

use crate::dynamics::EvolutionResult;
use crate::error::{Error, Result};
use crate::operators::{kron, pauli, DensityMatrix, OperatorMatrix, Pauli, QUBIT1, QUBIT2};

/// Tolerance on max|ρ − ρ†| accepted by `concurrence`.
pub const CONCURRENCE_HERMITIAN_TOL: f64 = 1e-8;
/// Most negative eigenvalue of ρ accepted by `concurrence`.
pub const CONCURRENCE_CLAMP_TOL: f64 = 1e-9;
/// Eigenvalues of ρ below this are round-off and dropped from √ρ.
const SPECTRUM_FLOOR: f64 = 1e-14;

/// Wootters concurrence of a two-qubit state.
///
/// The λ_i are the singular values of A = √ρ (σ^y⊗σ^y) √ρ*, since
/// A A† = √ρ ρ̃ √ρ shares its spectrum with ρρ̃. Taking singular values
/// directly avoids a second square root that would lift round-off in the
/// null space of a pure state to ~1e-8. ρ* is the entrywise conjugate in
/// the fixed `(g, e)` product basis.
pub fn concurrence(rho2q: &DensityMatrix) -> Result<f64> {
    let rho = rho2q.as_operator();
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let defect = rho.hermiticity_defect();
    if defect > CONCURRENCE_HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let rho = rho.hermitian_part();
    let min = rho.hermitian_eigenvalues()[0];
    if min < -CONCURRENCE_CLAMP_TOL {
        return Err(Error::NumericalDefect(format!(
            "negative eigenvalue {min:e} in two-qubit state"
        )));
    }
    let yy = kron(&pauli(Pauli::Y), &pauli(Pauli::Y));
    let sqrt_rho = rho.hermitian_function(|x| if x > SPECTRUM_FLOOR { x.sqrt() } else { 0.0 });
    let a = sqrt_rho.matmul(&yy).matmul(&sqrt_rho.conj());
    let mut lambda: Vec<f64> = a.to_dmatrix().singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// Tr(ρ Π_e) for qubit 0 or 1 of the full state.
pub fn excitation_probability(rho: &DensityMatrix, qubit: usize) -> Result<f64> {
    let slot = match qubit {
        0 => QUBIT1,
        1 => QUBIT2,
        _ => return Err(Error::InvalidSlot { slot: qubit, slots: 2 }),
    };
    let dims = rho.subsystem_dims();
    if dims.len() != 3 {
        return Err(Error::InvalidState(format!(
            "expected the 3-slot layout, got {dims:?}"
        )));
    }
    let op = rho.as_operator();
    let (d1, dc) = (dims[1], dims[2]);
    let mut p = 0.0;
    for k in 0..op.dim() {
        let q1 = k / (d1 * dc);
        let q2 = (k / dc) % d1;
        let level = if slot == QUBIT1 { q1 } else { q2 };
        if level == 1 {
            p += op.get(k, k).re;
        }
    }
    Ok(p)
}

/// Tr(ρ a†a).
pub fn photon_number(rho: &DensityMatrix) -> f64 {
    let dims = rho.subsystem_dims();
    let dc = *dims.last().expect("nonempty layout");
    let op = rho.as_operator();
    (0..op.dim())
        .map(|k| (k % dc) as f64 * op.get(k, k).re)
        .sum()
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Two-qubit reduced state (cavity traced out).
pub fn qubit_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.partial_trace(&[QUBIT1, QUBIT2])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservablePoint {
    pub concurrence: f64,
    pub p_q1: f64,
    pub p_q2: f64,
    pub n_photons: f64,
    pub purity: f64,
}

pub fn observe(rho: &DensityMatrix) -> Result<ObservablePoint> {
    Ok(ObservablePoint {
        concurrence: concurrence(&qubit_state(rho)?)?,
        p_q1: excitation_probability(rho, 0)?,
        p_q2: excitation_probability(rho, 1)?,
        n_photons: photon_number(rho),
        purity: purity(rho),
    })
}

/// Sampled observables on a time grid in cavity periods.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableTrace {
    pub times: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub p_q1: Vec<f64>,
    pub p_q2: Vec<f64>,
    pub n_photons: Vec<f64>,
    pub purity: Vec<f64>,
}

impl ObservableTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, time: f64, p: ObservablePoint) {
        self.times.push(time);
        self.concurrence.push(p.concurrence);
        self.p_q1.push(p.p_q1);
        self.p_q2.push(p.p_q2);
        self.n_photons.push(p.n_photons);
        self.purity.push(p.purity);
    }

    pub fn point(&self, k: usize) -> ObservablePoint {
        ObservablePoint {
            concurrence: self.concurrence[k],
            p_q1: self.p_q1[k],
            p_q2: self.p_q2[k],
            n_photons: self.n_photons[k],
            purity: self.purity[k],
        }
    }

    /// Index of the sample closest to `time` (periods).
    pub fn index_at(&self, time: f64) -> usize {
        let mut best = 0;
        for (k, t) in self.times.iter().enumerate() {
            if (t - time).abs() < (self.times[best] - time).abs() {
                best = k;
            }
        }
        best
    }

    /// Largest pointwise change in concurrence and populations against
    /// another trace on the same grid.
    pub fn max_delta(&self, other: &ObservableTrace) -> f64 {
        let pairs = [
            (&self.concurrence, &other.concurrence),
            (&self.p_q1, &other.p_q1),
            (&self.p_q2, &other.p_q2),
        ];
        pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

pub fn trace_observables(result: &EvolutionResult) -> Result<ObservableTrace> {
    let mut out = ObservableTrace::default();
    for (t, rho) in result.times.iter().zip(&result.states) {
        out.push(*t, observe(rho)?);
    }
    Ok(out)
}

/// Projector |e⟩⟨e| on one qubit, embedded in the full layout.
pub fn excited_projector_on(qubit: usize, layout: &[usize]) -> Result<OperatorMatrix> {
    crate::operators::embed(&crate::operators::excited_projector(), qubit, layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{basis_ket, kron_ket, C64};

    fn ket(v: &[(f64, f64)]) -> Vec<C64> {
        v.iter().map(|&(re, im)| C64::new(re, im)).collect()
    }

    #[test]
    fn product_and_bell_states() {
        let gg = basis_ket(&[2, 2], &[0, 0]).unwrap();
        let rho = DensityMatrix::from_pure(&[2, 2], &gg).unwrap();
        assert!(concurrence(&rho).unwrap().abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ket(&[(0.0, 0.0), (s, 0.0), (s, 0.0), (0.0, 0.0)]);
        let rho = DensityMatrix::from_pure(&[2, 2], &bell).unwrap();
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_with_vacuum_reduces_to_bell() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ket(&[(0.0, 0.0), (s, 0.0), (s, 0.0), (0.0, 0.0)]);
        let vac = basis_ket(&[3], &[0]).unwrap();
        let full = DensityMatrix::from_pure(&[2, 2, 3], &kron_ket(&bell, &vac)).unwrap();
        let red = qubit_state(&full).unwrap();
        let expected = DensityMatrix::from_pure(&[2, 2], &bell).unwrap();
        assert!(red.as_operator().max_abs_diff(expected.as_operator()) < 1e-15);
        assert!((concurrence(&red).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        let rho = DensityMatrix::from_pure(&[3], &basis_ket(&[3], &[0]).unwrap()).unwrap();
        assert!(concurrence(&rho).is_err());
        let mut op = OperatorMatrix::from_real_diagonal(&[2, 2], &[0.25; 4]);
        op.set(0, 1, C64::new(0.1, 0.0));
        let nh = DensityMatrix::from_operator_unchecked(op);
        assert!(matches!(concurrence(&nh), Err(Error::NotHermitian(_))));
        let neg = OperatorMatrix::from_real_diagonal(&[2, 2], &[1.1, -0.1, 0.0, 0.0]);
        let neg = DensityMatrix::from_operator_unchecked(neg);
        assert!(matches!(concurrence(&neg), Err(Error::NumericalDefect(_))));
    }

    #[test]
    fn pure_states_to_round_off() {
        // a|gg⟩ + b|ee⟩ has C = 2|ab|.
        for theta in [0.0, 1e-6, 0.1, 0.4, std::f64::consts::FRAC_PI_4] {
            let (a, b) = (theta.cos(), theta.sin());
            let psi = ket(&[(a, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, b)]);
            let rho = DensityMatrix::from_pure(&[2, 2], &psi).unwrap();
            let c = concurrence(&rho).unwrap();
            assert!((c - 2.0 * a * b).abs() < 1e-13, "theta {theta}: {c}");
        }
    }

    #[test]
    fn populations_on_basis_states() {
        let layout = [2, 2, 3];
        let ge0 = DensityMatrix::from_pure(&layout, &basis_ket(&layout, &[0, 1, 0]).unwrap())
            .unwrap();
        assert_eq!(excitation_probability(&ge0, 0).unwrap(), 0.0);
        assert_eq!(excitation_probability(&ge0, 1).unwrap(), 1.0);
        assert!(excitation_probability(&ge0, 2).is_err());
        assert_eq!(photon_number(&ge0), 0.0);

        let gg1 = DensityMatrix::from_pure(&layout, &basis_ket(&layout, &[0, 0, 1]).unwrap())
            .unwrap();
        assert_eq!(photon_number(&gg1), 1.0);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ket(&[(s, 0.0), (s, 0.0)]);
        let pp0 = kron_ket(&kron_ket(&plus, &plus), &basis_ket(&[3], &[0]).unwrap());
        let rho = DensityMatrix::from_pure(&layout, &pp0).unwrap();
        assert!((excitation_probability(&rho, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((excitation_probability(&rho, 1).unwrap() - 0.5).abs() < 1e-15);

        // agrees with the embedded projector
        let proj = excited_projector_on(1, &layout).unwrap();
        assert!((rho.expectation(&proj).re - 0.5).abs() < 1e-15);
    }
}
