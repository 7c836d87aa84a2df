//! Second-order perturbation theory for the ground-state and single-excitation
//! problems.
//!
//! Starting from |g g 0⟩ the two-qubit concurrence to second order in g/ω is
//! C = 2·max(|X| − P_e, 0), where X is the photon-exchange amplitude that
//! takes |g g⟩ to |e e⟩ and P_e the single-qubit emission probability:
//!
//! X   = g₁g₂ ∫₀ᵀdt₂∫₀^{t₂}dt₁ m₂(t₂)m₁(t₁) e^{iω^q(t₁+t₂)} e^{−iω(t₂−t₁)} + (1↔2)
//! P_e = g²  |∫₀ᵀ m(t) e^{i(ω^q+ω)t} dt|²
//!
//! The `numeric_*` functions evaluate these integrals by quadrature and are
//! the reference values. The `bessel_*` functions evaluate the truncated
//! Jacobi–Anger series forms exactly as they are usually quoted for the
//! quarter-wavelength pair, so their disagreement with the quadrature can be
//! measured.

use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use log::warn;

use crate::error::{Error, Result};
use crate::model::{ModulationProfile, SystemConfig};
use crate::operators::{C64, ZERO};

/// J_n(x) by its ascending power series.
///
/// Σ_m (−1)^m (x/2)^{2m+n} / (m! (m+n)!), summed until the terms stop
/// contributing. Absolute error stays below 1e-12 for |x| ≤ 10.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if m as f64 > half.abs() && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        if m > 200 {
            break;
        }
    }
    sum
}

// Gauss–Kronrod 7/15 nodes and weights on [−1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |Kronrod − Gauss| on [a, b].
fn gk15(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// 15-point Kronrod rule without the error estimate.
fn kronrod(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> C64 {
    gk15(f, a, b).0
}

struct Interval {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature of a complex integrand.
///
/// The range starts split into `panels` equal pieces so that oscillations
/// are resolved before the first error estimate; the interval with the
/// largest error is bisected until the total error meets
/// max(abs_tol, rel_tol·|I|).
pub fn integrate(
    f: impl Fn(f64) -> C64,
    a: f64,
    b: f64,
    panels: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<C64> {
    if a == b {
        return Ok(ZERO);
    }
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels * 2);
    let mut total = ZERO;
    let mut total_err = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == panels { b } else { lo + width };
        let (value, err) = gk15(&f, lo, hi);
        total += value;
        total_err += err;
        heap.push(Interval { a: lo, b: hi, value, err });
    }
    let max_intervals = panels + 200_000;
    while total_err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= max_intervals {
            return Err(Error::Quadrature {
                estimate: total_err,
                target: abs_tol.max(rel_tol * total.norm()),
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Interval { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, err: e2 });
    }
    // Re-sum to shed accumulated update round-off.
    Ok(heap.iter().map(|iv| iv.value).sum())
}

/// ∫₀ᵀ dt₂ outer(t₂) ∫₀^{t₂} inner(t₁) dt₁ on a shared panel grid.
///
/// Inner values at the outer nodes are a running prefix over whole panels
/// plus a Kronrod rule on the partial panel. The grid is doubled until two
/// successive results agree to `rel_tol`.
pub fn ordered_integral(
    inner: impl Fn(f64) -> C64,
    outer: impl Fn(f64) -> C64,
    t_total: f64,
    initial_panels: usize,
    rel_tol: f64,
) -> Result<C64> {
    if t_total == 0.0 {
        return Ok(ZERO);
    }
    let eval = |panels: usize| -> C64 {
        let h = t_total / panels as f64;
        let mut prefix = ZERO;
        let mut acc = ZERO;
        for p in 0..panels {
            let lo = p as f64 * h;
            let hi = lo + h;
            let c = 0.5 * (lo + hi);
            let half = 0.5 * h;
            let cumulative = |t: f64| prefix + kronrod(&inner, lo, t);
            let mut panel = outer(c) * cumulative(c) * WGK[7];
            for j in 0..7 {
                let dx = half * XGK[j];
                let (tl, tr) = (c - dx, c + dx);
                panel += (outer(tl) * cumulative(tl) + outer(tr) * cumulative(tr)) * WGK[j];
            }
            acc += panel * half;
            prefix += kronrod(&inner, lo, hi);
        }
        acc
    };
    let mut panels = initial_panels.max(1);
    let mut previous = eval(panels);
    let mut estimate = f64::INFINITY;
    for _ in 0..12 {
        panels *= 2;
        let current = eval(panels);
        estimate = (current - previous).norm();
        if estimate <= rel_tol * current.norm() || estimate <= 1e-300 {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Quadrature {
        estimate,
        target: rel_tol * previous.norm(),
    })
}

/// Parameters of a perturbative evaluation. Times in 1/ω, frequencies in
/// units of ω; the cavity frequency is ω^q − Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeInput {
    pub g: [f64; 2],
    pub omega_q: f64,
    pub delta: f64,
    pub profiles: [ModulationProfile; 2],
    pub t_total: f64,
}

impl PerturbativeInput {
    /// Quarter-wavelength pair with a common drive, symmetric coupling.
    pub fn entanglement(g: f64, omega_q: f64, delta: f64, omega_d: f64, t_total: f64) -> Self {
        Self {
            g: [g, g],
            omega_q,
            delta,
            profiles: ModulationProfile::entanglement_pair(omega_d, omega_d),
            t_total,
        }
    }

    pub fn from_config(cfg: &SystemConfig, t_total: f64) -> Result<Self> {
        if (cfg.omega_q[0] - cfg.omega_q[1]).abs() > 1e-12 {
            return Err(Error::InvalidConfig(
                "perturbative formulas assume equal qubit frequencies".into(),
            ));
        }
        Ok(Self {
            g: cfg.g,
            omega_q: cfg.omega_q[0] / cfg.omega,
            delta: (cfg.omega_q[0] - cfg.omega) / cfg.omega,
            profiles: cfg.modulation,
            t_total,
        })
    }

    pub fn with_time(&self, t_total: f64) -> Self {
        Self { t_total, ..*self }
    }

    pub fn omega_cavity(&self) -> f64 {
        self.omega_q - self.delta
    }

    /// max_ℓ g_ℓ · T.
    pub fn g_t(&self) -> f64 {
        self.g[0].abs().max(self.g[1].abs()) * self.t_total
    }

    pub fn is_perturbative(&self) -> bool {
        self.g_t() < 1.0
    }

    fn warn_if_invalid(&self) {
        if !self.is_perturbative() {
            warn!("g·T = {:.3} >= 1: outside the perturbative regime", self.g_t());
        }
    }

    /// Panel count resolving the fastest oscillation of the integrands.
    fn panels(&self) -> usize {
        let mut nu = self.omega_q.abs() + self.omega_cavity().abs();
        for p in &self.profiles {
            if p.enabled {
                nu += p.omega_d * (p.delta_f + 4.0);
            }
        }
        let width = (std::f64::consts::PI / nu.max(1.0)).min(1.0);
        (self.t_total / width).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeResult {
    pub x: C64,
    pub p_e: f64,
    /// g·T < 1.
    pub validity: bool,
}

impl PerturbativeResult {
    /// C = 2·max(|X| − P_e, 0).
    pub fn concurrence(&self) -> f64 {
        2.0 * (self.x.norm() - self.p_e).max(0.0)
    }
}

const X_REL_TOL: f64 = 1e-6;
const PE_REL_TOL: f64 = 1e-8;

/// Exchange amplitude X by time-ordered quadrature.
pub fn numeric_x(input: &PerturbativeInput) -> Result<C64> {
    input.warn_if_invalid();
    let coupling = input.g[0] * input.g[1];
    if coupling == 0.0 || input.t_total == 0.0 {
        return Ok(ZERO);
    }
    let wq = input.omega_q;
    let w = input.omega_cavity();
    let [p1, p2] = input.profiles;
    let ordered = |early: ModulationProfile, late: ModulationProfile| {
        ordered_integral(
            move |t1| early.value(t1) * C64::from_polar(1.0, (wq + w) * t1),
            move |t2| late.value(t2) * C64::from_polar(1.0, (wq - w) * t2),
            input.t_total,
            input.panels(),
            X_REL_TOL,
        )
    };
    let total = ordered(p1, p2)? + ordered(p2, p1)?;
    Ok(total * coupling)
}

/// Emission probability of one qubit (0 or 1).
///
/// Ground start: g²|∫ m e^{i(ω^q+ω)t}|² (counterrotating emission).
/// Excited start: g²|∫ m e^{−iΔt}|², which is g²|∫ m|² on resonance.
pub fn numeric_pe(input: &PerturbativeInput, qubit: usize, initial_excited: bool) -> Result<f64> {
    if qubit > 1 {
        return Err(Error::InvalidSlot { slot: qubit, slots: 2 });
    }
    input.warn_if_invalid();
    let g = input.g[qubit];
    if g == 0.0 || input.t_total == 0.0 {
        return Ok(0.0);
    }
    let p = input.profiles[qubit];
    let freq = if initial_excited {
        -input.delta
    } else {
        input.omega_q + input.omega_cavity()
    };
    let amp = integrate(
        move |t| p.value(t) * C64::from_polar(1.0, freq * t),
        0.0,
        input.t_total,
        input.panels(),
        PE_REL_TOL,
        1e-15 * input.t_total,
    )?;
    Ok(g * g * amp.norm_sqr())
}

/// ∫₀ᵀ e^{iat} dt, without cancellation for small aT.
fn exp_integral(a: f64, t: f64) -> C64 {
    let theta = a * t;
    if theta.abs() < 1e-9 {
        return C64::new(t, 0.5 * theta * t);
    }
    let s = (0.5 * theta).sin();
    C64::new(theta.sin(), 2.0 * s * s) / a
}

/// ∫₀ᵀ t e^{iat} dt.
fn weighted_exp_integral(a: f64, t: f64) -> C64 {
    let theta = a * t;
    if theta.abs() < 1e-3 {
        // Σ_k (iθ)^k / (k! (k+2)) · T²
        let mut sum = ZERO;
        let mut term = C64::new(1.0, 0.0);
        for k in 0..12 {
            if k > 0 {
                term *= C64::new(0.0, theta) / k as f64;
            }
            sum += term / (k + 2) as f64;
        }
        return sum * t * t;
    }
    let e = C64::from_polar(1.0, theta);
    t * e / C64::new(0.0, a) + (e - 1.0) / (a * a)
}

/// ∫₀ᵀ dt₂ e^{iαt₂} ∫₀^{t₂} e^{iβt₁} dt₁ in closed form.
pub fn ordered_exp_integral(alpha: f64, beta: f64, t: f64) -> C64 {
    if (beta * t).abs() < 1e-9 {
        return weighted_exp_integral(alpha, t);
    }
    (exp_integral(alpha + beta, t) - exp_integral(alpha, t)) / C64::new(0.0, beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesTerms {
    /// Every term of the truncated series.
    All,
    /// Only the non-oscillating (resonant) terms.
    SecularOnly,
}

fn check_pair(input: &PerturbativeInput) -> Result<()> {
    let [p1, p2] = input.profiles;
    let ok = p1.enabled
        && p2.enabled
        && (p1.delta_f - FRAC_PI_4).abs() < 1e-12
        && (p2.delta_f - FRAC_PI_4).abs() < 1e-12
        && ((p2.f0 - p1.f0).abs() - FRAC_PI_2).abs() < 1e-12
        && (p1.omega_d - p2.omega_d).abs() < 1e-12
        && (p1.phase - p2.phase).abs() < 1e-12;
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedProfile(
            "series forms need the quarter-wavelength pair (Δf = π/4, f0 offset π/2, common drive)"
                .into(),
        ))
    }
}

const SECULAR_EPS: f64 = 1e-12;

/// X from the series in which m₁m₂ is replaced by
/// J₀(π/2) − 2J₂(π/2)cos(2ω_d t₁) + 2J₄(π/2)cos(4ω_d t₁), integrated term by term.
pub fn bessel_x(input: &PerturbativeInput) -> Result<C64> {
    bessel_x_terms(input, SeriesTerms::All)
}

pub fn bessel_x_terms(input: &PerturbativeInput, terms: SeriesTerms) -> Result<C64> {
    check_pair(input)?;
    let t = input.t_total;
    let alpha = input.delta;
    let base = 2.0 * input.omega_q - input.delta;
    let wd = input.profiles[0].omega_d;
    let z = FRAC_PI_2;
    // (harmonic of ω_d, coefficient of cos)
    let series = [
        (0.0, bessel_j(0, z)),
        (2.0, -2.0 * bessel_j(2, z)),
        (4.0, 2.0 * bessel_j(4, z)),
    ];
    let mut sum = ZERO;
    for (k, coef) in series {
        // cos(kω_d t) = (e^{ikω_d t} + e^{−ikω_d t}) / 2
        let branches: &[(f64, f64)] = if k == 0.0 {
            &[(0.0, 1.0)]
        } else {
            &[(1.0, 0.5), (-1.0, 0.5)]
        };
        for &(sign, weight) in branches {
            let beta = base + sign * k * wd;
            let secular = alpha.abs() < SECULAR_EPS && beta.abs() < SECULAR_EPS;
            if terms == SeriesTerms::SecularOnly && !secular {
                continue;
            }
            sum += ordered_exp_integral(alpha, beta, t) * (coef * weight);
        }
    }
    Ok(sum * (input.g[0] * input.g[1]))
}

/// P_e from (g²/2)|∫ e^{i(2ω^q−Δ)t} S(t) dt|² with
/// S = J₀ − 2J₂cos2ω_d t + 2J₁cos ω_d t − 2J₃cos3ω_d t + 2J₄cos4ω_d t at π/4.
///
/// This is the exact Jacobi–Anger expansion for the member of the pair whose
/// rest phase is 3π/4 (qubit 2 of `entanglement_pair`), truncated at J₄.
pub fn bessel_pe(input: &PerturbativeInput) -> Result<f64> {
    bessel_pe_terms(input, SeriesTerms::All)
}

pub fn bessel_pe_terms(input: &PerturbativeInput, terms: SeriesTerms) -> Result<f64> {
    check_pair(input)?;
    let t = input.t_total;
    let base = 2.0 * input.omega_q - input.delta;
    let wd = input.profiles[0].omega_d;
    let z = FRAC_PI_4;
    let series = [
        (0.0, bessel_j(0, z)),
        (1.0, 2.0 * bessel_j(1, z)),
        (2.0, -2.0 * bessel_j(2, z)),
        (3.0, -2.0 * bessel_j(3, z)),
        (4.0, 2.0 * bessel_j(4, z)),
    ];
    let mut amp = ZERO;
    for (k, coef) in series {
        let branches: &[(f64, f64)] = if k == 0.0 {
            &[(0.0, 1.0)]
        } else {
            &[(1.0, 0.5), (-1.0, 0.5)]
        };
        for &(sign, weight) in branches {
            let nu = base + sign * k * wd;
            if terms == SeriesTerms::SecularOnly && nu.abs() >= SECULAR_EPS {
                continue;
            }
            amp += exp_integral(nu, t) * (coef * weight);
        }
    }
    let g = input.g[1];
    Ok(0.5 * g * g * amp.norm_sqr())
}

/// g²T²[J₂(π/2) − J₂(π/4)²].
pub fn resonant_concurrence(g: f64, t: f64) -> f64 {
    if g * t >= 1.0 {
        warn!("g·T = {:.3} >= 1: outside the perturbative regime", g * t);
    }
    g * g * t * t * (bessel_j(2, FRAC_PI_2) - bessel_j(2, FRAC_PI_4).powi(2))
}

/// Concurrence bound from the quadrature values of X and the larger of the
/// two ground-state emission probabilities.
pub fn perturbative_concurrence(input: &PerturbativeInput) -> Result<PerturbativeResult> {
    let x = numeric_x(input)?;
    let p_e = numeric_pe(input, 0, false)?.max(numeric_pe(input, 1, false)?);
    Ok(PerturbativeResult {
        x,
        p_e,
        validity: input.is_perturbative(),
    })
}

/// Quadrature against series values for the same input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesComparison {
    pub x_numeric: C64,
    pub x_series: C64,
    pub pe_numeric: f64,
    pub pe_series: f64,
}

impl SeriesComparison {
    pub fn x_ratio(&self) -> f64 {
        self.x_series.norm() / self.x_numeric.norm()
    }

    pub fn pe_ratio(&self) -> f64 {
        self.pe_series / self.pe_numeric
    }
}

pub fn compare_series(input: &PerturbativeInput) -> Result<SeriesComparison> {
    Ok(SeriesComparison {
        x_numeric: numeric_x(input)?,
        x_series: bessel_x(input)?,
        pe_numeric: numeric_pe(input, 1, false)?,
        pe_series: bessel_pe(input)?,
    })
}
