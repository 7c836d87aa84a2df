//! Built-in scenarios.
//!
//! | name          | qubits                         | cavity       | start     | sweep                         |
//! |---------------|--------------------------------|--------------|-----------|-------------------------------|
//! | fig2a / fig2b | λ/4 pair, g = 0.02             | κ 0.002/0.2  | gg0       | (ω_d1, ω_d2) ∈ {0, ½, 1, 2}²  |
//! | fig3a / fig3b | mirror-to-mirror, g₁ = 0       | κ 0.002/0.2  | ge0       | ω_d2 ∈ {0, ½, 1, 3/2, 2}      |
//! | fig4a / fig4b | mirror-to-mirror, ω_d2 = 0 / 1 | κ 0.2        | ge0       | (g₁, ω_d1)                    |
//! | fig5a / fig5b | qubit 1 at L/4, amp L/4, L/16  | κ 0.1        | ge0       | none                          |
//! | s1a / s1b     | λ/4 pair, ω = 0.4 ω^q          | κ 0.002/0.2  | gg0       | (ω_d1, ω_d2)                  |
//! | s2a / s2b     | as fig4 without g₁ = 0         | κ 0.2        | ge0       | ω_d1                          |
//! | s3            | mirror-to-mirror, g = 0.01     | κ            | ee0, pp0  | κ × start × moving/reference  |
//!
//! All frequencies are in units of the cavity frequency. The s1 pair is
//! defined with ω = 0.4 ω^q and rescaled so that ω = 1.

use super::{InitialState, ScenarioSpec, Sweep, SweepAxis};
use crate::error::{Error, Result};
use crate::model::{dephasing_rate, ModulationProfile, SystemConfig};

pub const PRESET_NAMES: [&str; 13] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "s1a", "s1b", "s2a",
    "s2b", "s3",
];

/// Quoted T₂/T₁ ratio used for every preset.
pub const T2_OVER_T1: f64 = 0.67;

const N_FOCK: usize = 10;

fn values(list: &[f64]) -> Vec<Vec<String>> {
    list.iter().map(|v| vec![v.to_string()]).collect()
}

fn grid(list: &[f64]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for a in list {
        for b in list {
            out.push(vec![a.to_string(), b.to_string()]);
        }
    }
    out
}

fn axis(name: &str, fields: &[&str], values: Vec<Vec<String>>) -> SweepAxis {
    SweepAxis {
        name: name.into(),
        fields: fields.iter().map(|s| s.to_string()).collect(),
        values,
    }
}

fn base_config(g: f64, gamma: f64, kappa: f64) -> SystemConfig {
    let gamma_phi = dephasing_rate(gamma, T2_OVER_T1);
    SystemConfig {
        omega: 1.0,
        omega_q: [1.0, 1.0],
        g: [g, g],
        modulation: [ModulationProfile::fixed(0.0); 2],
        kappa,
        gamma: [gamma, gamma],
        gamma_phi: [gamma_phi, gamma_phi],
        n_fock: N_FOCK,
    }
}

fn spec(name: &str, config: SystemConfig, start: InitialState, t_final: f64) -> ScenarioSpec {
    ScenarioSpec {
        name: name.into(),
        config,
        initial_state: start,
        t_final,
        samples: (t_final * 10.0).round() as usize + 1,
        sweep: Sweep::default(),
        output_path: None,
    }
}

const DRIVE_FIELDS: [&str; 2] = ["modulation.1.omega_d", "modulation.2.omega_d"];

fn fig2(name: &str, kappa: f64) -> ScenarioSpec {
    let mut cfg = base_config(0.02, 0.002, kappa);
    cfg.modulation = ModulationProfile::entanglement_pair(1.0, 1.0);
    let mut s = spec(name, cfg, InitialState::Gg0, 40.0);
    s.sweep.axes.push(axis("drive", &DRIVE_FIELDS, grid(&[0.0, 0.5, 1.0, 2.0])));
    s
}

fn fig3(name: &str, kappa: f64) -> ScenarioSpec {
    let mut cfg = base_config(0.02, 0.002, kappa);
    cfg.g[0] = 0.0;
    cfg.modulation = [ModulationProfile::mirror_to_mirror(0.0); 2];
    let mut s = spec(name, cfg, InitialState::Ge0, 40.0);
    s.sweep.axes.push(axis(
        "drive2",
        &["modulation.2.omega_d"],
        values(&[0.0, 0.5, 1.0, 1.5, 2.0]),
    ));
    s
}

fn fig4(name: &str, omega_d2: f64, include_decoupled: bool) -> ScenarioSpec {
    let mut cfg = base_config(0.02, 0.002, 0.2);
    cfg.modulation = [
        ModulationProfile::mirror_to_mirror(0.0),
        ModulationProfile::mirror_to_mirror(omega_d2),
    ];
    let mut s = spec(name, cfg, InitialState::Ge0, 40.0);
    let mut points = Vec::new();
    if include_decoupled {
        points.push(vec!["0".to_string(), "0".to_string()]);
    }
    for wd in [0.0, 0.5, 1.0, 2.0] {
        points.push(vec!["0.02".to_string(), wd.to_string()]);
    }
    s.sweep
        .axes
        .push(axis("qubit1", &["system.g.1", "modulation.1.omega_d"], points));
    s
}

fn fig5(name: &str, amplitude_fraction: f64) -> ScenarioSpec {
    let mut cfg = base_config(0.01, 0.001, 0.1);
    cfg.omega_q[0] = 1.1;
    cfg.modulation = [
        ModulationProfile::quarter_cavity(amplitude_fraction, 2.0),
        ModulationProfile::mirror_to_mirror(2.0),
    ];
    spec(name, cfg, InitialState::Ge0, 40.0)
}

fn s1(name: &str, kappa_in_qubit_units: f64) -> ScenarioSpec {
    // ω = 0.4 ω^q: with ω as the unit, ω^q = 2.5 and every rate quoted in
    // units of ω^q scales by 2.5.
    let scale = 2.5;
    let mut cfg = base_config(0.02 * scale, 0.002 * scale, kappa_in_qubit_units * scale);
    cfg.omega_q = [scale, scale];
    cfg.modulation = ModulationProfile::entanglement_pair(scale, scale);
    // 40 qubit periods.
    let mut s = spec(name, cfg, InitialState::Gg0, 40.0 / scale);
    let drives: Vec<f64> = [0.0, 0.5, 1.0, 2.0].iter().map(|f| f * scale).collect();
    s.sweep.axes.push(axis("drive", &DRIVE_FIELDS, grid(&drives)));
    s
}

fn s3() -> ScenarioSpec {
    let mut cfg = base_config(0.01, 0.001, 0.1);
    cfg.modulation = [ModulationProfile::mirror_to_mirror(2.0); 2];
    let mut s = spec("s3", cfg, InitialState::Ee0, 20.0);
    s.sweep.axes = vec![
        axis("kappa", &["system.kappa"], values(&[0.001, 0.1])),
        axis(
            "start",
            &["scenario.initial_state"],
            vec![vec!["ee0".into()], vec!["pp0".into()]],
        ),
        axis(
            "motion",
            &["system.g.1", "modulation.2.omega_d"],
            vec![
                vec!["0.01".into(), "2".into()],
                vec!["0".into(), "0".into()],
            ],
        ),
    ];
    s
}

pub fn preset(name: &str) -> Result<ScenarioSpec> {
    let s = match name {
        "fig2a" => fig2(name, 0.002),
        "fig2b" => fig2(name, 0.2),
        "fig3a" => fig3(name, 0.002),
        "fig3b" => fig3(name, 0.2),
        "fig4a" => fig4(name, 0.0, true),
        "fig4b" => fig4(name, 1.0, true),
        "fig5a" => fig5(name, 0.25),
        "fig5b" => fig5(name, 1.0 / 16.0),
        "s1a" => s1(name, 0.002),
        "s1b" => s1(name, 0.2),
        "s2a" => fig4(name, 0.0, false),
        "s2b" => fig4(name, 1.0, false),
        "s3" => s3(),
        other => return Err(Error::UnknownPreset(other.into())),
    };
    Ok(s)
}
