//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use accelrad::analytics::{bessel_j, numeric_pe, numeric_x, resonant_concurrence, PerturbativeInput};
use accelrad::dynamics::{evolve, evolve_piecewise_exact, IntegratorOptions};
use accelrad::model::{ModulationProfile, SystemConfig};
use accelrad::observables::{concurrence, trace_observables};
use accelrad::operators::{kron, pauli, DensityMatrix, OperatorMatrix, Pauli, C64};
use accelrad::scenario::runner::{PointStatus, RunReport};
use accelrad::scenario::{preset, run, InitialState, RunOptions, PRESET_NAMES};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn lsq_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn resonant_closed_config(g: f64) -> SystemConfig {
    SystemConfig {
        g: [g, g],
        modulation: ModulationProfile::entanglement_pair(1.0, 1.0),
        ..SystemConfig::default()
    }
}

/// Closed-system concurrence from |g g 0⟩ against the quadratic law.
fn criterion_1() -> Outcome {
    let g = 0.02;
    let cfg = resonant_closed_config(g);
    let rho0 = InitialState::Gg0.density_matrix(&cfg).unwrap();
    let t_end = 0.3 / g;
    let res = evolve(&cfg, &rho0, cfg.time_to_periods(t_end), &IntegratorOptions::default(), 4)
        .unwrap();
    let trace = trace_observables(&res).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (k, gt) in [(1, 0.1), (2, 0.2), (3, 0.3)] {
        let t = gt / g;
        let sim = trace.concurrence[k];
        let law = resonant_concurrence(g, t);
        let err = rel(sim, law);
        pass &= err <= 0.15;
        parts.push(format!("gT={gt}: C={sim:.6} law={law:.6} rel={err:.3}"));
        xs.push(t.ln());
        ys.push(sim.ln());
    }
    let slope = lsq_slope(&xs, &ys);
    pass &= (slope - 2.0).abs() <= 0.1;
    parts.push(format!("slope={slope:.3}"));
    outcome(pass, parts.join("; "))
}

/// Bessel integral representation, independent of the power series.
fn bessel_integral(n: u32, x: f64) -> f64 {
    let m = 4000;
    let h = 2.0 * PI / m as f64;
    (0..m)
        .map(|k| {
            let tau = k as f64 * h;
            (n as f64 * tau - x * tau.sin()).cos()
        })
        .sum::<f64>()
        / m as f64
}

fn criterion_2() -> Outcome {
    let g = 0.02;
    let t = 0.3 / g;
    let input = PerturbativeInput::entanglement(g, 1.0, 0.0, 1.0, t);
    let x = numeric_x(&input).unwrap().norm();
    let x_law = 0.5 * g * g * bessel_j(2, FRAC_PI_2) * t * t;
    let pe = numeric_pe(&input, 0, false)
        .unwrap()
        .max(numeric_pe(&input, 1, false).unwrap());
    let pe_law = 0.5 * g * g * bessel_j(2, FRAC_PI_4).powi(2) * t * t;
    let mut bessel_err: f64 = 0.0;
    for n in 0..6 {
        for x in [0.1, FRAC_PI_4, 1.0, FRAC_PI_2, 2.5, 5.0] {
            bessel_err = bessel_err.max((bessel_j(n, x) - bessel_integral(n, x)).abs());
        }
    }
    let (ex, ep) = (rel(x, x_law), rel(pe, pe_law));
    let pass = ex <= 0.10 && ep <= 0.10 && bessel_err <= 1e-10;
    outcome(
        pass,
        format!(
            "|X|={x:.6e} law={x_law:.6e} rel={ex:.3}; P_e={pe:.6e} law={pe_law:.6e} rel={ep:.3}; \
             bessel max err={bessel_err:.1e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let g = 0.02;
    let j1 = bessel_j(1, FRAC_PI_2);
    let mut pass = true;
    let mut parts = Vec::new();
    for wd in [1.0, 2.0] {
        let mut input = PerturbativeInput {
            g: [g, g],
            omega_q: 1.0,
            delta: 0.0,
            profiles: [ModulationProfile::mirror_to_mirror(wd); 2],
            t_total: 0.0,
        };
        let peak = 4.0 * g * g * j1 * j1 / (wd * wd);
        let mut worst: f64 = 0.0;
        for k in 1..=240 {
            let phase = 6.0 * PI * k as f64 / 240.0;
            input.t_total = phase / wd;
            let p = numeric_pe(&input, 1, true).unwrap();
            let law = peak * phase.sin().powi(2);
            worst = worst.max((p - law).abs() / peak);
        }
        pass &= worst <= 0.05;
        parts.push(format!("w_d={wd}: max dev/peak={worst:.4}"));
    }
    let mut input = PerturbativeInput {
        g: [g, g],
        omega_q: 1.0,
        delta: 0.0,
        profiles: [ModulationProfile::mirror_to_mirror(0.0); 2],
        t_total: 0.0,
    };
    let mut worst: f64 = 0.0;
    for k in 1..=60 {
        input.t_total = 6.0 * PI * k as f64 / 60.0;
        let p = numeric_pe(&input, 1, true).unwrap();
        worst = worst.max(rel(p, (g * input.t_total).powi(2)));
    }
    pass &= worst <= 0.01;
    parts.push(format!("w_d=0: max rel={worst:.2e}"));
    outcome(pass, parts.join("; "))
}

fn find<'a>(report: &'a RunReport, wanted: &[(&str, &str)]) -> &'a accelrad::observables::ObservableTrace {
    report
        .find(wanted)
        .and_then(|p| p.trace.as_ref())
        .unwrap_or_else(|| panic!("{}: no trace for {wanted:?}", report.name))
}

const D1: &str = "modulation.1.omega_d";
const D2: &str = "modulation.2.omega_d";

fn c_max(t: &accelrad::observables::ObservableTrace) -> f64 {
    t.concurrence.iter().copied().fold(0.0, f64::max)
}

fn criterion_4(reports: &HashMap<&str, RunReport>) -> Outcome {
    let a = &reports["fig2a"];
    let c11 = c_max(find(a, &[(D1, "1"), (D2, "1")]));
    let c00 = c_max(find(a, &[(D1, "0"), (D2, "0")]));
    let ratio_ok = c11 > 0.0 && c11 >= 5.0 * c00;
    let b = find(&reports["fig2b"], &[(D1, "2"), (D2, "0")]);
    let t_end = *b.times.last().unwrap();
    let late: Vec<f64> = b
        .times
        .iter()
        .zip(&b.concurrence)
        .filter(|(t, _)| **t >= 0.8 * t_end)
        .map(|(_, c)| *c)
        .collect();
    let mean = late.iter().sum::<f64>() / late.len() as f64;
    let std = (late.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / late.len() as f64).sqrt();
    let pass = ratio_ok && mean > 0.5 && std < 0.1;
    outcome(
        pass,
        format!(
            "fig2a C_max(1,1)={c11:.4} C_max(0,0)={c00:.2e} [{}]; fig2b (2,0) late mean={mean:.4} \
             std={std:.4} [{}]",
            if ratio_ok { "ok" } else { "fail" },
            if mean > 0.5 && std < 0.1 { "ok" } else { "fail" }
        ),
    )
}

fn criterion_5(reports: &HashMap<&str, RunReport>) -> Outcome {
    let r = &reports["fig3b"];
    let spec = preset("fig3b").unwrap();
    let gamma = spec.config.gamma[1];
    let moving = find(r, &[(D2, "2")]);
    let fixed = find(r, &[(D2, "0")]);
    let k5 = moving.index_at(5.0);
    let (pm, ps) = (moving.p_q2[k5], fixed.p_q2[fixed.index_at(5.0)]);
    let rise = fixed
        .p_q2
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let dev = moving
        .times
        .iter()
        .zip(&moving.p_q2)
        .map(|(t, p)| (p - (-gamma * 2.0 * PI * t).exp()).abs())
        .fold(0.0, f64::max);
    let pass = pm > ps && rise <= 1e-3 && dev <= 0.15;
    outcome(
        pass,
        format!(
            "p_q2(5): moving={pm:.4} static={ps:.4}; static max rise={rise:.2e}; \
             moving max |p - exp(-Gt)|={dev:.4}"
        ),
    )
}

fn criterion_6(reports: &HashMap<&str, RunReport>) -> Outcome {
    let r = &reports["s3"];
    let mut pass = true;
    let mut parts = Vec::new();
    for start in ["ee0", "pp0"] {
        let base = [("system.kappa", "0.1"), ("scenario.initial_state", start)];
        let moving = find(r, &[base[0], base[1], ("system.g.1", "0.01"), (D2, "2")]);
        let reference = find(r, &[base[0], base[1], ("system.g.1", "0"), (D2, "0")]);
        let (km, kr) = (moving.index_at(10.0), reference.index_at(10.0));
        let (p1, p2, pref) = (moving.p_q1[km], moving.p_q2[km], reference.p_q2[kr]);
        pass &= p1 > pref && p2 > pref;
        parts.push(format!("{start}: moving p1={p1:.4} p2={p2:.4} reference p2={pref:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_7(reports: &HashMap<&str, RunReport>, wall: f64) -> Outcome {
    let mut pass = true;
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    let mut bad = Vec::new();
    for name in PRESET_NAMES {
        for p in &reports[name].points {
            let ok_point = match (p.diagnostics, p.fock_delta) {
                (Some(d), Some(f)) => {
                    worst.0 = worst.0.max(d.max_trace_drift);
                    worst.1 = worst.1.max(d.max_hermiticity_defect);
                    worst.2 = worst.2.min(d.min_eigenvalue);
                    worst.3 = worst.3.max(f);
                    p.status == PointStatus::Ok
                        && d.max_trace_drift <= 1e-8
                        && d.max_hermiticity_defect <= 1e-9
                        && d.min_eigenvalue >= -1e-7
                        && f <= 1e-3
                }
                _ => false,
            };
            if !ok_point {
                bad.push(format!("{name}#{}", p.index));
            }
            pass &= ok_point;
        }
    }
    outcome(
        pass,
        format!(
            "drift={:.1e} herm={:.1e} min_eig={:.1e} fock_delta={:.1e} wall={wall:.0}s{}",
            worst.0,
            worst.1,
            worst.2,
            worst.3,
            if bad.is_empty() {
                String::new()
            } else {
                format!(" failing: {}", bad.join(","))
            }
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut cfg = preset("fig2a").unwrap().config.with_fock(3);
    cfg.modulation[0].omega_d = 1.0;
    cfg.modulation[1].omega_d = 1.0;
    let rho0 = InitialState::Gg0.density_matrix(&cfg).unwrap();
    let adaptive = evolve(&cfg, &rho0, 5.0, &IntegratorOptions::default(), 2).unwrap();
    let exact = evolve_piecewise_exact(&cfg, &rho0, 5.0, 1000).unwrap();
    let diff = adaptive
        .final_state()
        .as_operator()
        .max_abs_diff(exact.as_operator());
    outcome(diff <= 1e-5, format!("max elementwise diff={diff:.2e}"))
}

fn random_ket(rng: &mut StdRng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn random_su2(rng: &mut StdRng) -> OperatorMatrix {
    let v = random_ket(rng, 2);
    let (a, b) = (v[0], v[1]);
    let phase = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
    OperatorMatrix::from_entries(&[2], vec![a * phase, -b.conj() * phase, b * phase, a.conj() * phase])
        .unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20240917);
    let yy = kron(&pauli(Pauli::Y), &pauli(Pauli::Y));
    let mut pure_err: f64 = 0.0;
    for _ in 0..1000 {
        let psi = random_ket(&mut rng, 4);
        let conj: Vec<C64> = psi.iter().map(|z| z.conj()).collect();
        let formula = yy.matrix_element(&psi, &conj).norm();
        let rho = DensityMatrix::from_pure(&[2, 2], &psi).unwrap();
        pure_err = pure_err.max((concurrence(&rho).unwrap() - formula).abs());
    }
    let mut lu_err: f64 = 0.0;
    for _ in 0..200 {
        let mut op = OperatorMatrix::zeros(&[2, 2]);
        let mut weights: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        for w in weights {
            let psi = random_ket(&mut rng, 4);
            op += &(w * &OperatorMatrix::outer(&[2, 2], &psi, &psi));
        }
        let rho = DensityMatrix::new(op.clone()).unwrap();
        let u = kron(&random_su2(&mut rng), &random_su2(&mut rng));
        let rotated = DensityMatrix::new(u.matmul(&op).matmul(&u.adjoint()).hermitian_part()).unwrap();
        lu_err = lu_err.max((concurrence(&rho).unwrap() - concurrence(&rotated).unwrap()).abs());
    }
    outcome(
        pure_err <= 1e-10 && lu_err <= 1e-9,
        format!("pure-state max err={pure_err:.1e}; local-unitary max err={lu_err:.1e}"),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |n: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((n, name, o, start.elapsed().as_secs_f64()));
    };

    timed(1, "resonant quadratic law", &criterion_1);
    timed(2, "perturbative oracle agreement", &criterion_2);
    timed(3, "single-atom sub-radiance formula", &criterion_3);

    let start = Instant::now();
    let mut reports = HashMap::new();
    for name in PRESET_NAMES {
        let spec = preset(name).unwrap();
        let report = run(&spec, &RunOptions::new(dir.path().join(name))).unwrap();
        reports.insert(name, report);
    }
    let suite_wall = start.elapsed().as_secs_f64();

    timed(4, "entanglement resonance ordering", &|| criterion_4(&reports));
    timed(5, "Zeno-like freezing", &|| criterion_5(&reports));
    timed(6, "two-atom sub-radiance", &|| criterion_6(&reports));
    timed(7, "state validity over all presets", &|| criterion_7(&reports, suite_wall));
    timed(8, "integrator oracle", &criterion_8);
    timed(9, "concurrence correctness", &criterion_9);

    let mut failed = 0;
    for (n, name, o, secs) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {n} ({name}, {secs:.1}s): {}", o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
