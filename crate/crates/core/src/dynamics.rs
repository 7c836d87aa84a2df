//! Lindblad master-equation integration.
//!
//! dρ/dt = −i[H(t), ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})
//!
//! `lindblad_rhs` is the dense reference form of the generator. `evolve`
//! compiles the same generator into nonzero lists once per run and steps
//! the full density matrix with RK4 or an adaptive Dormand–Prince 5(4)
//! pair. `propagator_exact` builds the frozen-midpoint superoperator and
//! exponentiates it; it is an oracle for tests, not a production path.

use std::f64::consts::PI;

use log::debug;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{collapse_operators, HamiltonianTerms, SystemConfig};
use crate::operators::{DensityMatrix, OperatorMatrix, C64, I, ONE, ZERO};

/// Smallest step the adaptive integrator accepts before giving up.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Fixed step (RK4) or initial step (RK45) in 1/ω. `None` picks
    /// (2π / fastest frequency) / 50.
    pub dt: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub renormalize_trace: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            dt: None,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            renormalize_trace: false,
        }
    }
}

impl IntegratorOptions {
    pub fn rk4(dt: f64) -> Self {
        Self {
            method: Method::Rk4Fixed,
            dt: Some(dt),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidConfig(format!("dt must be > 0, got {dt}")));
            }
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be > 0".into()));
        }
        Ok(())
    }

    pub fn initial_step(&self, cfg: &SystemConfig) -> f64 {
        self.dt
            .unwrap_or_else(|| 2.0 * PI / cfg.max_frequency() / 50.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Largest |Tr ρ − 1| seen after any accepted step, before any
    /// renormalization.
    pub max_trace_drift: f64,
    /// Smallest eigenvalue over all samples.
    pub min_eigenvalue: f64,
    /// Largest max|ρ − ρ†| over all samples.
    pub max_hermiticity_defect: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            max_trace_drift: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_hermiticity_defect: 0.0,
            accepted_steps: 0,
            rejected_steps: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Sample times in cavity periods (ωt/2π).
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Diagnostics,
}

impl EvolutionResult {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("at least two samples")
    }
}

/// Dense generator: −i[H, ρ] + Σ_k (L ρ L† − ½ L†L ρ − ½ ρ L†L).
pub fn lindblad_rhs(
    h: &OperatorMatrix,
    rho: &OperatorMatrix,
    collapse: &[OperatorMatrix],
) -> Result<OperatorMatrix> {
    let dim = rho.dim();
    for op in std::iter::once(h).chain(collapse) {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
    }
    let mut out = (-I) * &h.commutator(rho);
    for l in collapse {
        let ld = l.adjoint();
        let ldl = ld.matmul(l);
        out += &l.matmul(rho).matmul(&ld);
        out += &(-0.5 * &ldl.anticommutator(rho));
    }
    Ok(out)
}

/// Nonzero entries of a dense operator.
#[derive(Debug, Clone, Default)]
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(op: &OperatorMatrix) -> Self {
        let n = op.dim();
        let mut entries = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = op.get(r, c);
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        Self { entries }
    }

    /// out += factor · A ρ
    fn left_mul_acc(&self, factor: C64, rho: &[C64], out: &mut [C64], n: usize) {
        for &(r, c, v) in &self.entries {
            let w = factor * v;
            let src = &rho[c * n..(c + 1) * n];
            let dst = &mut out[r * n..(r + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }

    /// out += factor · ρ A†
    fn right_adjoint_mul_acc(&self, factor: C64, rho: &[C64], out: &mut [C64], n: usize) {
        // (ρ A†)[i, r] = Σ_c ρ[i, c] conj(A[r, c])
        for &(r, c, v) in &self.entries {
            let w = factor * v.conj();
            for i in 0..n {
                out[i * n + r] += w * rho[i * n + c];
            }
        }
    }

    /// out += L ρ L†
    fn sandwich_acc(&self, rho: &[C64], out: &mut [C64], n: usize) {
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &self.entries {
                out[r1 * n + r2] += v1 * rho[c1 * n + c2] * v2.conj();
            }
        }
    }
}

/// Lindblad generator compiled into sparse pieces:
/// H_eff(t) = (H₀ − i K) + Σ_ℓ c_ℓ(t) V_ℓ with K = ½ Σ L†L.
struct CompiledGenerator {
    n: usize,
    static_eff: Sparse,
    couplings: [Sparse; 2],
    jumps: Vec<Sparse>,
    terms: HamiltonianTerms,
}

impl CompiledGenerator {
    fn new(cfg: &SystemConfig) -> Result<Self> {
        let terms = HamiltonianTerms::new(cfg)?;
        let collapse = collapse_operators(cfg)?;
        let mut eff = terms.static_part.clone();
        for l in &collapse {
            let k = l.adjoint().matmul(l);
            eff += &((-0.5 * I) * &k);
        }
        Ok(Self {
            n: cfg.dim(),
            static_eff: Sparse::from_dense(&eff),
            couplings: [
                Sparse::from_dense(&terms.couplings[0]),
                Sparse::from_dense(&terms.couplings[1]),
            ],
            jumps: collapse.iter().map(Sparse::from_dense).collect(),
            terms,
        })
    }

    fn rhs(&self, t: f64, rho: &[C64], out: &mut [C64]) {
        let n = self.n;
        out.iter_mut().for_each(|z| *z = ZERO);
        // −i H_eff ρ + i ρ H_eff†
        self.static_eff.left_mul_acc(-I, rho, out, n);
        self.static_eff.right_adjoint_mul_acc(I, rho, out, n);
        let c = self.terms.coefficients(t);
        for q in 0..2 {
            if c[q] != 0.0 {
                let s = C64::new(c[q], 0.0);
                self.couplings[q].left_mul_acc(-I * s, rho, out, n);
                self.couplings[q].right_adjoint_mul_acc(I * s, rho, out, n);
            }
        }
        for l in &self.jumps {
            l.sandwich_acc(rho, out, n);
        }
    }
}

fn trace_of(rho: &[C64], n: usize) -> C64 {
    (0..n).map(|k| rho[k * n + k]).sum()
}

/// Dormand–Prince 5(4) tableau.
mod dp {
    pub const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    pub const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    /// 5th-order weights (equal to the last row of A, so FSAL applies).
    #[cfg(test)]
    pub const B: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    /// B − B̂ (difference to the embedded 4th-order weights).
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
}

struct Stepper<'a> {
    gen: &'a CompiledGenerator,
    len: usize,
    k: Vec<Vec<C64>>,
    stage: Vec<C64>,
    fsal_valid: bool,
}

impl<'a> Stepper<'a> {
    fn new(gen: &'a CompiledGenerator) -> Self {
        let len = gen.n * gen.n;
        Self {
            gen,
            len,
            k: vec![vec![ZERO; len]; 7],
            stage: vec![ZERO; len],
            fsal_valid: false,
        }
    }

    fn rk4(&mut self, t: f64, h: f64, y: &mut [C64]) {
        let (k, stage) = (&mut self.k, &mut self.stage);
        self.gen.rhs(t, y, &mut k[0]);
        for i in 0..self.len {
            stage[i] = y[i] + 0.5 * h * k[0][i];
        }
        self.gen.rhs(t + 0.5 * h, stage, &mut k[1]);
        for i in 0..self.len {
            stage[i] = y[i] + 0.5 * h * k[1][i];
        }
        self.gen.rhs(t + 0.5 * h, stage, &mut k[2]);
        for i in 0..self.len {
            stage[i] = y[i] + h * k[2][i];
        }
        self.gen.rhs(t + h, stage, &mut k[3]);
        for i in 0..self.len {
            y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
    }

    /// One Dormand–Prince attempt. Writes the candidate into `y_new` and
    /// returns the scaled RMS error estimate.
    fn dopri(
        &mut self,
        t: f64,
        h: f64,
        y: &[C64],
        y_new: &mut [C64],
        rel_tol: f64,
        abs_tol: f64,
    ) -> f64 {
        if !self.fsal_valid {
            self.gen.rhs(t, y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        for s in 1..7 {
            for i in 0..self.len {
                let mut acc = y[i];
                for j in 0..s {
                    let a = dp::A[s][j];
                    if a != 0.0 {
                        acc += h * a * self.k[j][i];
                    }
                }
                self.stage[i] = acc;
            }
            self.gen.rhs(t + dp::C[s] * h, &self.stage, &mut self.k[s]);
        }
        // Stage 7 was evaluated at y + h Σ B_j k_j, which is the 5th-order
        // solution itself.
        y_new.copy_from_slice(&self.stage);
        let mut sum = 0.0;
        for i in 0..self.len {
            let mut err = ZERO;
            for j in 0..7 {
                let e = dp::E[j];
                if e != 0.0 {
                    err += h * e * self.k[j][i];
                }
            }
            let scale = abs_tol + rel_tol * y[i].norm().max(y_new[i].norm());
            sum += (err.norm() / scale).powi(2);
        }
        (sum / self.len as f64).sqrt()
    }

    fn accept_fsal(&mut self) {
        self.k.swap(0, 6);
    }
}

/// Largest adaptive step that keeps every generator mode inside the
/// Dormand–Prince stability region (which reaches about 3.3 along the
/// imaginary axis). Without the cap the controller settles on the region's
/// edge and lets round-off in the fastest cavity coherences grow to the
/// tolerance level.
pub fn stability_step(cfg: &SystemConfig) -> f64 {
    let n = cfg.n_fock as f64;
    let coupling = 4.0 * (cfg.g[0].abs() + cfg.g[1].abs()) * (n + 1.0).sqrt();
    let spread = cfg.omega * n + cfg.omega_q[0].abs() + cfg.omega_q[1].abs() + coupling;
    let damping = cfg.kappa * n + cfg.gamma.iter().chain(&cfg.gamma_phi).sum::<f64>();
    2.5 / (spread + damping)
}

/// Integrates from `rho0` over `t_final` cavity periods, sampling
/// `samples` evenly spaced times including both ends.
pub fn evolve(
    cfg: &SystemConfig,
    rho0: &DensityMatrix,
    t_final: f64,
    opts: &IntegratorOptions,
    samples: usize,
) -> Result<EvolutionResult> {
    cfg.validate()?;
    opts.validate()?;
    if rho0.dim() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: rho0.dim(),
        });
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_final must be > 0, got {t_final}")));
    }
    if samples < 2 {
        return Err(Error::InvalidConfig("need at least 2 samples".into()));
    }

    let gen = CompiledGenerator::new(cfg)?;
    let layout = cfg.layout();
    let n = gen.n;
    let t_end = cfg.periods_to_time(t_final);
    let sample_times: Vec<f64> = (0..samples)
        .map(|k| t_end * k as f64 / (samples - 1) as f64)
        .collect();

    let mut y: Vec<C64> = rho0.as_operator().entries().to_vec();
    let mut y_new = vec![ZERO; n * n];
    let mut diag = Diagnostics::default();
    let mut states = Vec::with_capacity(samples);
    let mut record = |y: &[C64], diag: &mut Diagnostics| -> Result<()> {
        let op = OperatorMatrix::from_entries(&layout, y.to_vec())?;
        diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(op.hermiticity_defect());
        let min = op.hermitian_eigenvalues()[0];
        diag.min_eigenvalue = diag.min_eigenvalue.min(min);
        states.push(DensityMatrix::from_operator_unchecked(op));
        Ok(())
    };
    record(&y, &mut diag)?;

    let mut stepper = Stepper::new(&gen);
    let mut t = 0.0;
    let h_max = stability_step(cfg);
    let mut h = opts.initial_step(cfg).min(h_max);
    let after_step = |y: &mut [C64], diag: &mut Diagnostics| {
        let tr = trace_of(y, n);
        diag.max_trace_drift = diag.max_trace_drift.max((tr - ONE).norm());
        diag.accepted_steps += 1;
        if opts.renormalize_trace {
            let inv = 1.0 / tr.re;
            y.iter_mut().for_each(|z| *z *= inv);
            true
        } else {
            false
        }
    };

    for &target in &sample_times[1..] {
        match opts.method {
            Method::Rk4Fixed => {
                let dt = opts.initial_step(cfg);
                let interval = target - t;
                let steps = (interval / dt).ceil().max(1.0) as usize;
                let hh = interval / steps as f64;
                for s in 0..steps {
                    stepper.rk4(t + s as f64 * hh, hh, &mut y);
                    after_step(&mut y, &mut diag);
                }
                t = target;
            }
            Method::Rk45Adaptive => {
                while t < target {
                    let remaining = target - t;
                    let clipped = h >= remaining;
                    let step = if clipped { remaining } else { h };
                    let err =
                        stepper.dopri(t, step, &y, &mut y_new, opts.rel_tol, opts.abs_tol);
                    if err.is_finite() && err <= 1.0 {
                        t = if clipped { target } else { t + step };
                        std::mem::swap(&mut y, &mut y_new);
                        stepper.accept_fsal();
                        if after_step(&mut y, &mut diag) {
                            stepper.fsal_valid = false;
                        }
                        let grow = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        // A step shortened to land on a sample should not
                        // shrink the next proposal.
                        h = if clipped { h.max(step * grow) } else { step * grow };
                        h = h.min(h_max);
                    } else {
                        diag.rejected_steps += 1;
                        let shrink = if err.is_finite() {
                            (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                        } else {
                            0.1
                        };
                        h = step * shrink;
                        if h < MIN_STEP {
                            return Err(Error::IntegrationFailure {
                                time: cfg.time_to_periods(t),
                                step: h,
                            });
                        }
                    }
                }
            }
        }
        record(&y, &mut diag)?;
    }
    debug!(
        "evolve: {} accepted, {} rejected steps, trace drift {:e}",
        diag.accepted_steps, diag.rejected_steps, diag.max_trace_drift
    );

    Ok(EvolutionResult {
        times: sample_times.iter().map(|&t| cfg.time_to_periods(t)).collect(),
        states,
        diagnostics: diag,
    })
}

/// Superoperator acting on row-major vec(ρ).
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub matrix: DMatrix<C64>,
    pub dims: Vec<usize>,
}

impl Superoperator {
    pub fn apply(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        let v = nalgebra::DVector::from_column_slice(rho.entries());
        if v.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.ncols(),
                found: v.len(),
            });
        }
        let out = &self.matrix * v;
        OperatorMatrix::from_entries(&self.dims, out.iter().copied().collect())
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let n = self.matrix.nrows();
        (0..n).all(|r| {
            (0..n).all(|c| {
                let expected = if r == c { ONE } else { ZERO };
                (self.matrix[(r, c)] - expected).norm() <= tol
            })
        })
    }
}

fn kron_dense(a: &OperatorMatrix, b: &OperatorMatrix) -> DMatrix<C64> {
    let (na, nb) = (a.dim(), b.dim());
    DMatrix::from_fn(na * nb, na * nb, |r, c| {
        a.get(r / nb, c / nb) * b.get(r % nb, c % nb)
    })
}

/// Dense Lindblad superoperator at time `t` (1/ω units), built from
/// Kronecker products: vec(AXB) = (A ⊗ Bᵀ) vec(X) for row-major vec.
pub fn lindblad_superoperator(cfg: &SystemConfig, t: f64) -> Result<DMatrix<C64>> {
    let h = HamiltonianTerms::new(cfg)?.at(t);
    let collapse = collapse_operators(cfg)?;
    let id = OperatorMatrix::identity(&cfg.layout());
    let mut gen = (kron_dense(&h, &id) - kron_dense(&id, &h.transpose())) * (-I);
    for l in &collapse {
        let ldl = l.adjoint().matmul(l);
        gen += kron_dense(l, &l.conj());
        gen -= kron_dense(&ldl, &id) * C64::new(0.5, 0.0);
        gen -= kron_dense(&id, &ldl.transpose()) * C64::new(0.5, 0.0);
    }
    Ok(gen)
}

/// exp(dt·𝓛) with 𝓛 frozen at the midpoint t0 + dt/2 (times in 1/ω).
pub fn propagator_exact(cfg: &SystemConfig, t0: f64, dt: f64) -> Result<Superoperator> {
    cfg.validate()?;
    let gen = lindblad_superoperator(cfg, t0 + 0.5 * dt)?;
    let matrix = (gen * C64::new(dt, 0.0)).exp();
    Ok(Superoperator {
        matrix,
        dims: cfg.layout().to_vec(),
    })
}

/// exp(A)·v by scaled Taylor series, summed to machine precision.
fn expm_action(a: &DMatrix<C64>, v: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
    let norm1 = (0..a.ncols())
        .map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let pieces = (norm1 / 0.5).ceil().max(1.0) as usize;
    let scaled = a * C64::new(1.0 / pieces as f64, 0.0);
    let mut out = v.clone();
    for _ in 0..pieces {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..60 {
            term = &scaled * term * C64::new(1.0 / k as f64, 0.0);
            acc += &term;
            let tn = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let an = acc.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if tn <= 1e-17 * an.max(1e-300) {
                break;
            }
        }
        out = acc;
    }
    out
}

/// Propagates `rho0` over `t_final` periods by composing `slices`
/// frozen-midpoint exponentials of the dense superoperator. Oracle for
/// `evolve`; cost grows as dim⁴ per slice.
pub fn evolve_piecewise_exact(
    cfg: &SystemConfig,
    rho0: &DensityMatrix,
    t_final: f64,
    slices: usize,
) -> Result<DensityMatrix> {
    cfg.validate()?;
    if slices == 0 {
        return Err(Error::InvalidConfig("need at least one slice".into()));
    }
    let t_end = cfg.periods_to_time(t_final);
    let dt = t_end / slices as f64;
    let mut v = nalgebra::DVector::from_column_slice(rho0.as_operator().entries());
    for s in 0..slices {
        let gen = lindblad_superoperator(cfg, (s as f64 + 0.5) * dt)? * C64::new(dt, 0.0);
        v = expm_action(&gen, &v);
    }
    let op = OperatorMatrix::from_entries(&cfg.layout(), v.iter().copied().collect())?;
    Ok(DensityMatrix::from_operator_unchecked(op))
}
