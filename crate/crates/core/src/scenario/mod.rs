//! Named scenarios: a system configuration, an initial state, a time window
//! and an optional sweep grid, plus the machinery that runs them and writes
//! CSV output.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::operators::{basis_ket, kron_ket, DensityMatrix, C64};

pub use config::{parse, serialize};
pub use presets::{preset, PRESET_NAMES};
pub use runner::{
    analytics_report, convergence_report, run, sweep_concurrence_map, RunOptions, RunReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// |g g 0⟩
    Gg0,
    /// |g e 0⟩: qubit 2 excited.
    Ge0,
    /// |e g 0⟩: qubit 1 excited.
    Eg0,
    /// |e e 0⟩
    Ee0,
    /// |+ + 0⟩ with |+⟩ = (|g⟩ + |e⟩)/√2.
    Pp0,
}

impl InitialState {
    pub const ALL: [InitialState; 5] = [Self::Gg0, Self::Ge0, Self::Eg0, Self::Ee0, Self::Pp0];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gg0 => "gg0",
            Self::Ge0 => "ge0",
            Self::Eg0 => "eg0",
            Self::Ee0 => "ee0",
            Self::Pp0 => "pp0",
        }
    }

    pub fn density_matrix(self, cfg: &SystemConfig) -> Result<DensityMatrix> {
        let layout = cfg.layout();
        let ket = match self {
            Self::Gg0 => basis_ket(&layout, &[0, 0, 0])?,
            Self::Ge0 => basis_ket(&layout, &[0, 1, 0])?,
            Self::Eg0 => basis_ket(&layout, &[1, 0, 0])?,
            Self::Ee0 => basis_ket(&layout, &[1, 1, 0])?,
            Self::Pp0 => {
                let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let plus = [s, s];
                kron_ket(&kron_ket(&plus, &plus), &basis_ket(&[layout[2]], &[0])?)
            }
        };
        DensityMatrix::from_pure(&layout, &ket)
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown initial state `{s}`")))
    }
}

/// One sweep dimension. Each entry of `values` assigns one value to every
/// field in `fields`, so coupled parameters move together.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub fields: Vec<String>,
    pub values: Vec<Vec<String>>,
}

/// Cartesian product of axes; the first axis varies slowest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sweep {
    pub axes: Vec<SweepAxis>,
}

impl Sweep {
    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Number of points; an empty sweep has one.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Field assignments of point `index`.
    pub fn assignments(&self, index: usize) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut stride = self.len();
        let mut rem = index;
        for axis in &self.axes {
            stride /= axis.values.len();
            let k = rem / stride;
            rem %= stride;
            for (field, value) in axis.fields.iter().zip(&axis.values[k]) {
                out.push((field.clone(), value.clone()));
            }
        }
        out
    }

    /// All swept field names in axis order.
    pub fn fields(&self) -> Vec<String> {
        self.axes.iter().flat_map(|a| a.fields.iter().cloned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub config: SystemConfig,
    pub initial_state: InitialState,
    /// Duration in cavity periods (ωt/2π).
    pub t_final: f64,
    /// Number of evenly spaced samples, both ends included.
    pub samples: usize,
    pub sweep: Sweep,
    /// Output directory; `None` defers to the caller's default.
    pub output_path: Option<PathBuf>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            config: SystemConfig::default(),
            initial_state: InitialState::Gg0,
            t_final: 1.0,
            samples: 2,
            sweep: Sweep::default(),
            output_path: None,
        }
    }
}

/// A single, sweep-free scenario with the coordinates that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub coordinates: Vec<(String, String)>,
    pub spec: ScenarioSpec,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::InvalidConfig(format!(
                "scenario name `{}` must be a non-empty identifier",
                self.name
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_final must be > 0, got {}",
                self.t_final
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidConfig(format!(
                "samples must be >= 2, got {}",
                self.samples
            )));
        }
        self.config.validate()?;
        for axis in &self.sweep.axes {
            if axis.fields.is_empty() || axis.values.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "sweep axis `{}` needs fields and values",
                    axis.name
                )));
            }
            for f in &axis.fields {
                if !config::is_sweepable(f) {
                    return Err(Error::InvalidConfig(format!(
                        "sweep axis `{}`: `{f}` is not a sweepable field",
                        axis.name
                    )));
                }
            }
            if let Some(v) = axis.values.iter().find(|v| v.len() != axis.fields.len()) {
                return Err(Error::InvalidConfig(format!(
                    "sweep axis `{}`: {} values for {} fields",
                    axis.name,
                    v.len(),
                    axis.fields.len()
                )));
            }
        }
        Ok(())
    }

    /// Expands the sweep into validated single-point specs.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        self.validate()?;
        let base = ScenarioSpec {
            sweep: Sweep::default(),
            ..self.clone()
        };
        (0..self.sweep.len())
            .map(|index| {
                let coordinates = self.sweep.assignments(index);
                let mut spec = base.clone();
                for (field, value) in &coordinates {
                    config::set_field(&mut spec, field, value)?;
                }
                spec.validate()?;
                Ok(SweepPoint {
                    index,
                    coordinates,
                    spec,
                })
            })
            .collect()
    }

    /// Applies the command-line overrides.
    pub fn with_overrides(
        mut self,
        n_fock: Option<usize>,
        t_final: Option<f64>,
        samples: Option<usize>,
    ) -> Self {
        if let Some(n) = n_fock {
            self.config.n_fock = n;
        }
        if let Some(t) = t_final {
            self.t_final = t;
        }
        if let Some(s) = samples {
            self.samples = s;
        }
        self
    }

    /// Sample times in cavity periods.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n)
            .map(|k| self.t_final * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_states() {
        let cfg = SystemConfig::default().with_fock(2);
        for s in InitialState::ALL {
            let rho = s.density_matrix(&cfg).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-15);
            assert_eq!(s.name().parse::<InitialState>().unwrap(), s);
        }
        let ge = InitialState::Ge0.density_matrix(&cfg).unwrap();
        assert_eq!(crate::observables::excitation_probability(&ge, 1).unwrap(), 1.0);
        assert!("xx0".parse::<InitialState>().is_err());
    }

    #[test]
    fn sweep_indexing() {
        let sweep = Sweep {
            axes: vec![
                SweepAxis {
                    name: "a".into(),
                    fields: vec!["system.kappa".into()],
                    values: vec![vec!["1".into()], vec!["2".into()]],
                },
                SweepAxis {
                    name: "b".into(),
                    fields: vec!["system.g.1".into(), "system.g.2".into()],
                    values: vec![
                        vec!["0".into(), "0".into()],
                        vec!["0.1".into(), "0.2".into()],
                        vec!["0.3".into(), "0.4".into()],
                    ],
                },
            ],
        };
        assert_eq!(sweep.len(), 6);
        let p = sweep.assignments(4);
        assert_eq!(p[0].1, "2");
        assert_eq!(p[1].1, "0.1");
        assert_eq!(p[2].1, "0.2");
        assert_eq!(Sweep::default().len(), 1);
    }

    #[test]
    fn validation() {
        let mut spec = ScenarioSpec::default();
        assert!(spec.validate().is_ok());
        spec.samples = 1;
        assert!(spec.validate().is_err());
        spec.samples = 3;
        spec.t_final = 0.0;
        assert!(spec.validate().is_err());
        spec.t_final = 1.0;
        spec.sweep.axes.push(SweepAxis {
            name: "x".into(),
            fields: vec!["system.nonexistent".into()],
            values: vec![vec!["1".into()]],
        });
        assert!(spec.validate().is_err());
        assert_eq!(spec.sample_times(), vec![0.0, 0.5, 1.0]);
    }
}
