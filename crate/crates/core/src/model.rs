//! System Hamiltonian, coupling modulation and dissipators.
//!
//! Units: ħ = 1 and every frequency or rate is a multiple of the cavity
//! frequency ω. Internal times are in 1/ω; reported times are in cavity
//! periods, ωt/2π.
//!
//! H(t) = ω a†a + Σ_ℓ [ (ω^q_ℓ/2) σ^z_ℓ + g_ℓ m_ℓ(t) σ^x_ℓ (a† + a) ]
//!
//! The coupling modulation m_ℓ(t) = cos(f0 + Δf cos(ω_d t + φ)) stands in for
//! the qubit moving through the standing wave: f0 is k·x at rest and Δf is
//! k times the oscillation amplitude.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::operators::{
    annihilation, embed, pauli, OperatorMatrix, Pauli, CAVITY, QUBIT1, QUBIT2,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationProfile {
    /// k·x of the rest position (radians).
    pub f0: f64,
    /// k times the motion amplitude (radians).
    pub delta_f: f64,
    /// Drive frequency in units of ω.
    pub omega_d: f64,
    /// Drive phase offset (radians).
    pub phase: f64,
    /// When false the qubit sits at f0 and m(t) = cos(f0).
    pub enabled: bool,
}

impl ModulationProfile {
    pub fn new(f0: f64, delta_f: f64, omega_d: f64, phase: f64) -> Result<Self> {
        let p = Self {
            f0,
            delta_f,
            omega_d,
            phase,
            enabled: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// Qubit held at a fixed phase `f0`.
    pub fn fixed(f0: f64) -> Self {
        Self {
            f0,
            delta_f: 0.0,
            omega_d: 0.0,
            phase: 0.0,
            enabled: false,
        }
    }

    /// Pair of qubits a quarter wavelength apart, moving rigidly with
    /// x₁(t) = −(D/2)(1 − cos ω_d t), D = λ/4. Qubit 2 sits π/2 further
    /// along the standing wave than qubit 1.
    pub fn entanglement_pair(omega_d1: f64, omega_d2: f64) -> [Self; 2] {
        [
            Self {
                f0: FRAC_PI_4,
                delta_f: FRAC_PI_4,
                omega_d: omega_d1,
                phase: 0.0,
                enabled: true,
            },
            Self {
                f0: FRAC_PI_4 + FRAC_PI_2,
                delta_f: FRAC_PI_4,
                omega_d: omega_d2,
                phase: 0.0,
                enabled: true,
            },
        ]
    }

    /// x(t) = L_c/2 + (L_c/2) cos(ω_d t): sweeps from mirror to mirror.
    pub fn mirror_to_mirror(omega_d: f64) -> Self {
        Self {
            f0: FRAC_PI_2,
            delta_f: FRAC_PI_2,
            omega_d,
            phase: 0.0,
            enabled: true,
        }
    }

    /// Rest position L_c/4 with a motion amplitude of `amplitude_fraction`
    /// cavity lengths (k·L_c = π).
    pub fn quarter_cavity(amplitude_fraction: f64, omega_d: f64) -> Self {
        Self {
            f0: FRAC_PI_4,
            delta_f: PI * amplitude_fraction,
            omega_d,
            phase: 0.0,
            enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.f0, self.delta_f, self.omega_d, self.phase]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("modulation parameters must be finite".into()));
        }
        if self.delta_f < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "delta_f must be >= 0, got {}",
                self.delta_f
            )));
        }
        if self.omega_d < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "omega_d must be >= 0, got {}",
                self.omega_d
            )));
        }
        Ok(())
    }

    /// True when m(t) does not depend on time.
    pub fn is_static(&self) -> bool {
        !self.enabled || self.delta_f == 0.0 || self.omega_d == 0.0
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if self.enabled {
            (self.f0 + self.delta_f * (self.omega_d * t + self.phase).cos()).cos()
        } else {
            self.f0.cos()
        }
    }
}

/// m(t) for a profile; `t` in units of 1/ω.
pub fn modulation_value(p: &ModulationProfile, t: f64) -> f64 {
    p.value(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Cavity frequency; sets the unit and is normally 1.
    pub omega: f64,
    pub omega_q: [f64; 2],
    pub g: [f64; 2],
    pub modulation: [ModulationProfile; 2],
    pub kappa: f64,
    /// Qubit relaxation rates Γ_ℓ (T₁ = 1/Γ).
    pub gamma: [f64; 2],
    /// Qubit pure-dephasing rates Γ_φℓ (T₂ = 1/Γ_φ).
    pub gamma_phi: [f64; 2],
    /// Cavity truncation N; the mode keeps Fock states 0..=N.
    pub n_fock: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega_q: [1.0, 1.0],
            g: [0.0, 0.0],
            modulation: [ModulationProfile::fixed(0.0); 2],
            kappa: 0.0,
            gamma: [0.0, 0.0],
            gamma_phi: [0.0, 0.0],
            n_fock: 10,
        }
    }
}

/// Γ_φ from Γ and a quoted T₂/T₁ ratio, using T₂ = 1/Γ_φ.
pub fn dephasing_rate(gamma: f64, t2_over_t1: f64) -> f64 {
    if gamma == 0.0 {
        0.0
    } else {
        gamma / t2_over_t1
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            self.kappa,
            self.gamma[0],
            self.gamma[1],
            self.gamma_phi[0],
            self.gamma_phi[1],
        ];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidConfig("rates must be finite and >= 0".into()));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidConfig("omega must be positive".into()));
        }
        if self.omega_q.iter().chain(&self.g).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("omega_q and g must be finite".into()));
        }
        if self.n_fock < 1 {
            return Err(Error::InvalidConfig("n_fock must be >= 1".into()));
        }
        for p in &self.modulation {
            p.validate()?;
        }
        Ok(())
    }

    /// Subsystem dimensions `[qubit1, qubit2, cavity]`.
    pub fn layout(&self) -> [usize; 3] {
        [2, 2, self.n_fock + 1]
    }

    pub fn dim(&self) -> usize {
        4 * (self.n_fock + 1)
    }

    pub fn detuning(&self, qubit: usize) -> f64 {
        self.omega_q[qubit] - self.omega
    }

    pub fn t1(&self, qubit: usize) -> f64 {
        1.0 / self.gamma[qubit]
    }

    pub fn t2(&self, qubit: usize) -> f64 {
        1.0 / self.gamma_phi[qubit]
    }

    pub fn with_fock(&self, n_fock: usize) -> Self {
        Self {
            n_fock,
            ..self.clone()
        }
    }

    /// Converts a duration in cavity periods (ωt/2π) to 1/ω units.
    pub fn periods_to_time(&self, periods: f64) -> f64 {
        2.0 * PI * periods / self.omega
    }

    pub fn time_to_periods(&self, t: f64) -> f64 {
        t * self.omega / (2.0 * PI)
    }

    /// Fastest coherent frequency in the problem.
    pub fn max_frequency(&self) -> f64 {
        let mut f = self.omega;
        for q in 0..2 {
            f = f.max(self.omega_q[q].abs());
            if self.modulation[q].enabled {
                f = f.max(self.modulation[q].omega_d);
            }
        }
        f
    }
}

/// H(t) split as H₀ + Σ_ℓ g_ℓ m_ℓ(t) V_ℓ with V_ℓ = σ^x_ℓ (a† + a).
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    pub static_part: OperatorMatrix,
    pub couplings: [OperatorMatrix; 2],
    pub g: [f64; 2],
    pub modulation: [ModulationProfile; 2],
}

impl HamiltonianTerms {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        let layout = cfg.layout();
        let a = annihilation(cfg.n_fock + 1)?;
        let quadrature = &a + &a.adjoint();
        let a_full = embed(&a, CAVITY, &layout)?;
        let x_field = embed(&quadrature, CAVITY, &layout)?;

        let mut h0 = cfg.omega * &a_full.adjoint().matmul(&a_full);
        let mut couplings = Vec::with_capacity(2);
        for (q, slot) in [QUBIT1, QUBIT2].into_iter().enumerate() {
            let sz = embed(&pauli(Pauli::Z), slot, &layout)?;
            h0 += &(0.5 * cfg.omega_q[q] * &sz);
            let sx = embed(&pauli(Pauli::X), slot, &layout)?;
            couplings.push(sx.matmul(&x_field));
        }
        let couplings: [OperatorMatrix; 2] = couplings.try_into().expect("two qubits");
        Ok(Self {
            static_part: h0,
            couplings,
            g: cfg.g,
            modulation: cfg.modulation,
        })
    }

    /// Scalar prefactors g_ℓ m_ℓ(t).
    pub fn coefficients(&self, t: f64) -> [f64; 2] {
        [
            self.g[0] * self.modulation[0].value(t),
            self.g[1] * self.modulation[1].value(t),
        ]
    }

    pub fn at(&self, t: f64) -> OperatorMatrix {
        let c = self.coefficients(t);
        let mut h = self.static_part.clone();
        for q in 0..2 {
            if c[q] != 0.0 {
                h += &(c[q] * &self.couplings[q]);
            }
        }
        h
    }
}

pub fn hamiltonian(cfg: &SystemConfig, t: f64) -> Result<OperatorMatrix> {
    Ok(HamiltonianTerms::new(cfg)?.at(t))
}

/// Zero-temperature dissipators: √κ a, √Γ_ℓ σ⁻_ℓ, √(Γ_φℓ/2) σ^z_ℓ.
/// Channels with zero rate are left out.
pub fn collapse_operators(cfg: &SystemConfig) -> Result<Vec<OperatorMatrix>> {
    let layout = cfg.layout();
    let mut out = Vec::new();
    if cfg.kappa > 0.0 {
        let a = embed(&annihilation(cfg.n_fock + 1)?, CAVITY, &layout)?;
        out.push(cfg.kappa.sqrt() * &a);
    }
    for (q, slot) in [QUBIT1, QUBIT2].into_iter().enumerate() {
        if cfg.gamma[q] > 0.0 {
            let sm = embed(&pauli(Pauli::Minus), slot, &layout)?;
            out.push(cfg.gamma[q].sqrt() * &sm);
        }
    }
    for (q, slot) in [QUBIT1, QUBIT2].into_iter().enumerate() {
        if cfg.gamma_phi[q] > 0.0 {
            let sz = embed(&pauli(Pauli::Z), slot, &layout)?;
            out.push((0.5 * cfg.gamma_phi[q]).sqrt() * &sz);
        }
    }
    Ok(out)
}
