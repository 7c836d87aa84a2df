//! Flat `key = value` configuration text.
//!
//! One assignment per line, `#` starts a comment, keys are dotted paths
//! (`system.omega_q.1`, `modulation.2.omega_d`). Sweep axes use
//! `sweep.NAME.fields = a, b` and `sweep.NAME.values = a1, b1 | a2, b2`.
//! Reals accept plain numbers and the forms `pi`, `k*pi`, `pi/d`, `k*pi/d`.
//! See `docs/config_schema.md` for the full schema.

use std::fs;
use std::path::{Path, PathBuf};

use super::{ScenarioSpec, SweepAxis};
use crate::error::{Error, Result};
use crate::model::ModulationProfile;

/// Every settable key in serialization order.
pub const FIELDS: &[&str] = &[
    "scenario.name",
    "scenario.initial_state",
    "scenario.t_final",
    "scenario.samples",
    "scenario.output_path",
    "system.omega",
    "system.omega_q.1",
    "system.omega_q.2",
    "system.g.1",
    "system.g.2",
    "system.kappa",
    "system.gamma.1",
    "system.gamma.2",
    "system.gamma_phi.1",
    "system.gamma_phi.2",
    "system.n_fock",
    "modulation.1.enabled",
    "modulation.1.f0",
    "modulation.1.delta_f",
    "modulation.1.omega_d",
    "modulation.1.phase",
    "modulation.2.enabled",
    "modulation.2.f0",
    "modulation.2.delta_f",
    "modulation.2.omega_d",
    "modulation.2.phase",
];

/// Fields a sweep may vary: everything except the name and output path.
pub fn is_sweepable(key: &str) -> bool {
    FIELDS.contains(&key) && key != "scenario.name" && key != "scenario.output_path"
}

/// Parses a real, allowing multiples and fractions of π.
pub fn parse_real(text: &str) -> Result<f64> {
    let s = text.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::InvalidConfig(format!("`{text}` is not a number"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => match k.trim().strip_suffix('*') {
            Some(k) => k.trim().parse::<f64>().map_err(|_| bad())?,
            None => return Err(bad()),
        },
        None => return Err(bad()),
    };
    Ok(factor * std::f64::consts::PI / den)
}

fn parse_usize(text: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("`{text}` is not a non-negative integer")))
}

fn parse_bool(text: &str) -> Result<bool> {
    match text.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::InvalidConfig(format!("`{other}` is not true/false"))),
    }
}

fn qubit_index(part: &str) -> Option<usize> {
    match part {
        "1" => Some(0),
        "2" => Some(1),
        _ => None,
    }
}

fn unknown(key: &str) -> Error {
    Error::InvalidConfig(format!("unknown key `{key}`"))
}

fn modulation_field<'a>(p: &'a mut ModulationProfile, name: &str) -> Option<&'a mut f64> {
    match name {
        "f0" => Some(&mut p.f0),
        "delta_f" => Some(&mut p.delta_f),
        "omega_d" => Some(&mut p.omega_d),
        "phase" => Some(&mut p.phase),
        _ => None,
    }
}

/// Sets one field from its text value.
pub fn set_field(spec: &mut ScenarioSpec, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    let parts: Vec<&str> = key.split('.').collect();
    let cfg = &mut spec.config;
    match parts.as_slice() {
        ["scenario", "name"] => spec.name = value.to_string(),
        ["scenario", "initial_state"] => spec.initial_state = value.parse()?,
        ["scenario", "t_final"] => spec.t_final = parse_real(value)?,
        ["scenario", "samples"] => spec.samples = parse_usize(value)?,
        ["scenario", "output_path"] => {
            spec.output_path = (!value.is_empty()).then(|| PathBuf::from(value))
        }
        ["system", "omega"] => cfg.omega = parse_real(value)?,
        ["system", "kappa"] => cfg.kappa = parse_real(value)?,
        ["system", "n_fock"] => cfg.n_fock = parse_usize(value)?,
        ["system", field, q] => {
            let q = qubit_index(q).ok_or_else(|| unknown(key))?;
            let slot = match *field {
                "omega_q" => &mut cfg.omega_q[q],
                "g" => &mut cfg.g[q],
                "gamma" => &mut cfg.gamma[q],
                "gamma_phi" => &mut cfg.gamma_phi[q],
                _ => return Err(unknown(key)),
            };
            *slot = parse_real(value)?;
        }
        ["modulation", q, "enabled"] => {
            let q = qubit_index(q).ok_or_else(|| unknown(key))?;
            cfg.modulation[q].enabled = parse_bool(value)?;
        }
        ["modulation", q, field] => {
            let q = qubit_index(q).ok_or_else(|| unknown(key))?;
            let slot = modulation_field(&mut cfg.modulation[q], field).ok_or_else(|| unknown(key))?;
            *slot = parse_real(value)?;
        }
        _ => return Err(unknown(key)),
    }
    Ok(())
}

/// Text value of one field. Reals use the shortest representation that
/// parses back to the same bits.
pub fn get_field(spec: &ScenarioSpec, key: &str) -> Result<String> {
    let cfg = &spec.config;
    let parts: Vec<&str> = key.split('.').collect();
    let text = match parts.as_slice() {
        ["scenario", "name"] => spec.name.clone(),
        ["scenario", "initial_state"] => spec.initial_state.to_string(),
        ["scenario", "t_final"] => spec.t_final.to_string(),
        ["scenario", "samples"] => spec.samples.to_string(),
        ["scenario", "output_path"] => spec
            .output_path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default(),
        ["system", "omega"] => cfg.omega.to_string(),
        ["system", "kappa"] => cfg.kappa.to_string(),
        ["system", "n_fock"] => cfg.n_fock.to_string(),
        ["system", field, q] => {
            let q = qubit_index(q).ok_or_else(|| unknown(key))?;
            match *field {
                "omega_q" => cfg.omega_q[q],
                "g" => cfg.g[q],
                "gamma" => cfg.gamma[q],
                "gamma_phi" => cfg.gamma_phi[q],
                _ => return Err(unknown(key)),
            }
            .to_string()
        }
        ["modulation", q, "enabled"] => {
            let q = qubit_index(q).ok_or_else(|| unknown(key))?;
            cfg.modulation[q].enabled.to_string()
        }
        ["modulation", q, field] => {
            let q = qubit_index(q).ok_or_else(|| unknown(key))?;
            let mut p = cfg.modulation[q];
            modulation_field(&mut p, field)
                .map(|v| v.to_string())
                .ok_or_else(|| unknown(key))?
        }
        _ => return Err(unknown(key)),
    };
    Ok(text)
}

/// Parses configuration text. Unset keys keep their defaults.
pub fn parse(text: &str) -> Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::default();
    let mut axes: Vec<SweepAxis> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let syntax = |message: String| Error::ConfigSyntax {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax("expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(rest) = key.strip_prefix("sweep.") {
            let (name, what) = rest
                .rsplit_once('.')
                .ok_or_else(|| syntax(format!("malformed sweep key `{key}`")))?;
            let pos = match axes.iter().position(|a| a.name == name) {
                Some(p) => p,
                None => {
                    axes.push(SweepAxis {
                        name: name.to_string(),
                        fields: Vec::new(),
                        values: Vec::new(),
                    });
                    axes.len() - 1
                }
            };
            let axis = &mut axes[pos];
            let list = |s: &str| s.split(',').map(|v| v.trim().to_string()).collect::<Vec<_>>();
            match what {
                "fields" => axis.fields = list(value),
                "values" => axis.values = value.split('|').map(list).collect(),
                _ => return Err(syntax(format!("unknown sweep key `{key}`"))),
            }
            continue;
        }
        set_field(&mut spec, key, value).map_err(|e| syntax(e.to_string()))?;
    }
    spec.sweep.axes = axes;
    spec.validate()?;
    // Every sweep value must be settable.
    for axis in &spec.sweep.axes {
        for group in &axis.values {
            let mut probe = spec.clone();
            for (f, v) in axis.fields.iter().zip(group) {
                set_field(&mut probe, f, v)?;
            }
        }
    }
    Ok(spec)
}

pub fn serialize(spec: &ScenarioSpec) -> String {
    let mut out = String::new();
    let mut section = "";
    for key in FIELDS {
        let head = key.split('.').next().unwrap_or("");
        if head != section {
            if !out.is_empty() {
                out.push('\n');
            }
            section = head;
        }
        let value = get_field(spec, key).expect("FIELDS are all readable");
        out.push_str(&format!("{key} = {value}\n"));
    }
    for axis in &spec.sweep.axes {
        out.push('\n');
        out.push_str(&format!("sweep.{}.fields = {}\n", axis.name, axis.fields.join(", ")));
        let groups: Vec<String> = axis.values.iter().map(|g| g.join(", ")).collect();
        out.push_str(&format!("sweep.{}.values = {}\n", axis.name, groups.join(" | ")));
    }
    out
}

pub fn load(path: &Path) -> Result<ScenarioSpec> {
    parse(&fs::read_to_string(path)?)
}

pub fn save(spec: &ScenarioSpec, path: &Path) -> Result<()> {
    fs::write(path, serialize(spec))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_forms() {
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_real("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real(" 2 * pi ").unwrap(), 2.0 * PI);
        assert!(parse_real("pie").is_err());
        assert!(parse_real("3pi").is_err());
        assert!(parse_real("").is_err());
    }

    #[test]
    fn parse_minimal_file() {
        let text = "\
# two qubits, one drive
scenario.name = demo
scenario.initial_state = ge0
scenario.t_final = 2.5
scenario.samples = 11
system.g.2 = 0.02   # coupling
system.kappa = 0.2
modulation.2.enabled = true
modulation.2.f0 = pi/2
modulation.2.delta_f = pi/2
modulation.2.omega_d = 2

sweep.drive.fields = modulation.2.omega_d
sweep.drive.values = 0 | 1 | 2
";
        let spec = parse(text).unwrap();
        assert_eq!(spec.name, "demo");
        assert_eq!(spec.samples, 11);
        assert_eq!(spec.config.g, [0.0, 0.02]);
        assert_eq!(spec.config.modulation[1].f0, PI / 2.0);
        assert_eq!(spec.sweep.len(), 3);
        let points = spec.points().unwrap();
        assert_eq!(points[2].spec.config.modulation[1].omega_d, 2.0);
        assert_eq!(points[0].spec.config.modulation[1].omega_d, 0.0);
        assert!(points[0].spec.sweep.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("scenario.name = a\nsystem.bogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::ConfigSyntax { line: 2, .. }), "{err}");
        let err = parse("no equals sign").unwrap_err();
        assert!(matches!(err, Error::ConfigSyntax { line: 1, .. }));
        let err = parse("system.g.3 = 1").unwrap_err();
        assert!(matches!(err, Error::ConfigSyntax { line: 1, .. }));
        assert!(parse("sweep.a.fields = system.kappa\nsweep.a.values = x").is_err());
        assert!(parse("sweep.a.fields = scenario.name\nsweep.a.values = x").is_err());
        assert!(parse("sweep.a.fields = system.kappa, system.g.1\nsweep.a.values = 1").is_err());
    }

    #[test]
    fn round_trip_default_and_awkward_values() {
        let mut spec = ScenarioSpec::default();
        spec.config.g = [0.1 + 0.2, 1.0 / 3.0];
        spec.config.modulation[0] = ModulationProfile::quarter_cavity(1.0 / 16.0, 2.0);
        spec.output_path = Some(PathBuf::from("out/x"));
        let back = parse(&serialize(&spec)).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn every_field_is_readable_and_writable() {
        let spec = ScenarioSpec::default();
        for key in FIELDS {
            let v = get_field(&spec, key).unwrap();
            let mut copy = spec.clone();
            set_field(&mut copy, key, &v).unwrap();
            assert_eq!(copy, spec, "{key}");
        }
    }
}
