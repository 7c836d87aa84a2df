//! Runs scenarios over their sweep grids and writes CSV output.
//!
//! Sweep points run on the rayon pool. Every point owns its output file and
//! the manifest is assembled after all points finish.

use std::env;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;

use super::output::{fmt_float, write_table, write_trace};
use super::ScenarioSpec;
use crate::analytics::{self, PerturbativeInput};
use crate::dynamics::{evolve, Diagnostics, IntegratorOptions};
use crate::error::{Error, Result};
use crate::observables::{trace_observables, ObservableTrace};

/// Environment variable that replaces the default output directory.
pub const OUTPUT_DIR_ENV: &str = "ACCELRAD_OUTPUT_DIR";
/// A point is FAILED when |Tr ρ − 1| exceeds this anywhere.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// A point is FAILED when raising the Fock cutoff moves any observable by
/// more than this.
pub const FOCK_DELTA_LIMIT: f64 = 1e-3;
/// Extra Fock levels used for the convergence rerun.
pub const FOCK_STEP: usize = 5;
/// Largest drive frequency accepted by `sweep_concurrence_map`.
pub const MAP_MAX_DRIVE: f64 = 2.5;

pub fn default_output_dir() -> PathBuf {
    env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("output"))
}

/// Directory for a spec: an explicit choice, else the spec's own path,
/// else `<default>/<name>`.
pub fn resolve_output_dir(spec: &ScenarioSpec, explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| spec.output_path.clone())
        .unwrap_or_else(|| default_output_dir().join(&spec.name))
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub output_dir: PathBuf,
    pub integrator: IntegratorOptions,
    /// Rerun every point at N + 5 and record the largest observable shift.
    pub fock_check: bool,
}

impl RunOptions {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            output_dir: output_dir.into(),
            integrator: IntegratorOptions::default(),
            fock_check: true,
        }
    }
}

/// Evolves one sweep-free spec and samples its observables.
pub fn simulate(
    spec: &ScenarioSpec,
    integrator: &IntegratorOptions,
) -> Result<(ObservableTrace, Diagnostics)> {
    let rho0 = spec.initial_state.density_matrix(&spec.config)?;
    let result = evolve(&spec.config, &rho0, spec.t_final, integrator, spec.samples)?;
    Ok((trace_observables(&result)?, result.diagnostics))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    Failed,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "OK",
            Self::Failed => "FAILED",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointReport {
    pub index: usize,
    pub coordinates: Vec<(String, String)>,
    pub file: PathBuf,
    pub status: PointStatus,
    pub diagnostics: Option<Diagnostics>,
    pub fock_delta: Option<f64>,
    /// Seconds, including the Fock rerun.
    pub wall_time: f64,
    pub error: Option<String>,
    pub trace: Option<ObservableTrace>,
}

impl PointReport {
    /// True when every `(field, value)` pair matches this point's
    /// coordinates, comparing numerically where both sides parse.
    pub fn matches(&self, wanted: &[(&str, &str)]) -> bool {
        wanted.iter().all(|(field, value)| {
            self.coordinates.iter().any(|(f, v)| {
                f == field
                    && match (v.parse::<f64>(), value.parse::<f64>()) {
                        (Ok(a), Ok(b)) => a == b,
                        _ => v == value,
                    }
            })
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub points: Vec<PointReport>,
    pub manifest: PathBuf,
}

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.points.iter().all(|p| p.status == PointStatus::Ok)
    }

    /// Every file written, manifest last.
    pub fn paths(&self) -> Vec<PathBuf> {
        let mut out: Vec<PathBuf> = self
            .points
            .iter()
            .filter(|p| p.trace.is_some())
            .map(|p| p.file.clone())
            .collect();
        out.push(self.manifest.clone());
        out
    }

    pub fn find(&self, wanted: &[(&str, &str)]) -> Option<&PointReport> {
        self.points.iter().find(|p| p.matches(wanted))
    }
}

fn run_point(
    name: &str,
    point: &super::SweepPoint,
    opts: &RunOptions,
) -> PointReport {
    let start = Instant::now();
    let file = opts
        .output_dir
        .join(format!("{name}_{:03}.csv", point.index));
    let outcome = (|| -> Result<(ObservableTrace, Diagnostics, Option<f64>)> {
        let (trace, diag) = simulate(&point.spec, &opts.integrator)?;
        write_trace(&file, &trace)?;
        let fock_delta = if opts.fock_check {
            let mut bigger = point.spec.clone();
            bigger.config.n_fock += FOCK_STEP;
            let (refined, _) = simulate(&bigger, &opts.integrator)?;
            Some(trace.max_delta(&refined))
        } else {
            None
        };
        Ok((trace, diag, fock_delta))
    })();
    let wall_time = start.elapsed().as_secs_f64();
    match outcome {
        Ok((trace, diag, fock_delta)) => {
            let ok = diag.max_trace_drift <= DRIFT_LIMIT
                && fock_delta.map_or(true, |d| d <= FOCK_DELTA_LIMIT);
            info!("{name} point {}: {:.1} s", point.index, wall_time);
            PointReport {
                index: point.index,
                coordinates: point.coordinates.clone(),
                file,
                status: if ok { PointStatus::Ok } else { PointStatus::Failed },
                diagnostics: Some(diag),
                fock_delta,
                wall_time,
                error: None,
                trace: Some(trace),
            }
        }
        Err(e) => {
            warn!("{name} point {} failed: {e}", point.index);
            PointReport {
                index: point.index,
                coordinates: point.coordinates.clone(),
                file,
                status: PointStatus::Failed,
                diagnostics: None,
                fock_delta: None,
                wall_time,
                error: Some(e.to_string()),
                trace: None,
            }
        }
    }
}

fn opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// Runs every sweep point, writing `<name>_NNN.csv` per point and
/// `<name>_manifest.csv`. Point failures are recorded, not propagated.
pub fn run(spec: &ScenarioSpec, opts: &RunOptions) -> Result<RunReport> {
    let points = spec.points()?;
    fs::create_dir_all(&opts.output_dir)?;
    let reports: Vec<PointReport> = points
        .par_iter()
        .map(|p| run_point(&spec.name, p, opts))
        .collect();

    let fields = spec.sweep.fields();
    let mut header: Vec<&str> = vec!["point", "file", "status"];
    header.extend(fields.iter().map(String::as_str));
    header.extend([
        "max_trace_drift",
        "min_eigenvalue",
        "max_hermiticity_defect",
        "fock_delta",
        "wall_time_s",
        "error",
    ]);
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row = vec![
                r.index.to_string(),
                r.file
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                r.status.as_str().to_string(),
            ];
            row.extend(r.coordinates.iter().map(|(_, v)| v.clone()));
            let d = r.diagnostics;
            row.push(opt_float(d.map(|d| d.max_trace_drift)));
            row.push(opt_float(d.map(|d| d.min_eigenvalue)));
            row.push(opt_float(d.map(|d| d.max_hermiticity_defect)));
            row.push(opt_float(r.fock_delta));
            row.push(format!("{:.3}", r.wall_time));
            row.push(r.error.clone().unwrap_or_default().replace([',', '\n'], ";"));
            row
        })
        .collect();
    let manifest = write_table(
        &opts.output_dir.join(format!("{}_manifest.csv", spec.name)),
        &header,
        &rows,
    )?;
    Ok(RunReport {
        name: spec.name.clone(),
        points: reports,
        manifest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub omega_d1: f64,
    pub omega_d2: f64,
    pub c_at_probe: f64,
    pub c_max: f64,
}

#[derive(Debug, Clone)]
pub struct ConcurrenceMap {
    pub cells: Vec<MapCell>,
    pub path: PathBuf,
}

impl ConcurrenceMap {
    pub fn cell(&self, omega_d1: f64, omega_d2: f64) -> Option<&MapCell> {
        self.cells
            .iter()
            .find(|c| c.omega_d1 == omega_d1 && c.omega_d2 == omega_d2)
    }
}

/// Concurrence at `t_probe` (periods) and its maximum over the window for
/// every (ω_d1, ω_d2) cell, written as `<name>_map.csv`. The base spec's
/// own sweep is ignored.
pub fn sweep_concurrence_map(
    base: &ScenarioSpec,
    omega_d1: &[f64],
    omega_d2: &[f64],
    t_probe: f64,
    opts: &RunOptions,
) -> Result<ConcurrenceMap> {
    let in_range = |v: &f64| (0.0..=MAP_MAX_DRIVE).contains(v);
    if !omega_d1.iter().chain(omega_d2).all(in_range) {
        return Err(Error::InvalidConfig(format!(
            "map drive frequencies must lie in [0, {MAP_MAX_DRIVE}]"
        )));
    }
    if !(0.0..=base.t_final).contains(&t_probe) {
        return Err(Error::InvalidConfig(format!(
            "probe time {t_probe} outside [0, {}]",
            base.t_final
        )));
    }
    let mut single = base.clone();
    single.sweep = Default::default();
    single.validate()?;
    let grid: Vec<(f64, f64)> = omega_d1
        .iter()
        .flat_map(|&a| omega_d2.iter().map(move |&b| (a, b)))
        .collect();
    let cells: Vec<MapCell> = grid
        .par_iter()
        .map(|&(a, b)| {
            let mut s = single.clone();
            s.config.modulation[0].omega_d = a;
            s.config.modulation[1].omega_d = b;
            let (trace, _) = simulate(&s, &opts.integrator)?;
            Ok(MapCell {
                omega_d1: a,
                omega_d2: b,
                c_at_probe: trace.concurrence[trace.index_at(t_probe)],
                c_max: trace.concurrence.iter().copied().fold(0.0, f64::max),
            })
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                c.omega_d1.to_string(),
                c.omega_d2.to_string(),
                fmt_float(c.c_at_probe),
                fmt_float(c.c_max),
            ]
        })
        .collect();
    let path = write_table(
        &opts.output_dir.join(format!("{}_map.csv", base.name)),
        &["omega_d1", "omega_d2", "c_at_probe", "c_max"],
        &rows,
    )?;
    Ok(ConcurrenceMap { cells, path })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub point: usize,
    /// `baseline`, `fock_plus_5` or `tolerance_halved`.
    pub comparison: &'static str,
    pub n_fock: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub final_concurrence: f64,
    pub final_p_q1: f64,
    pub final_p_q2: f64,
    /// Largest change of concurrence or populations over the whole trace
    /// relative to the baseline.
    pub max_delta: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub path: PathBuf,
}

impl ConvergenceReport {
    pub fn max_delta(&self) -> f64 {
        self.rows.iter().map(|r| r.max_delta).fold(0.0, f64::max)
    }
}

/// Reruns every point at N + 5 and at halved tolerances and writes
/// `<name>_convergence.csv`: three rows per point.
pub fn convergence_report(spec: &ScenarioSpec, opts: &RunOptions) -> Result<ConvergenceReport> {
    let points = spec.points()?;
    let per_point: Vec<Vec<ConvergenceRow>> = points
        .par_iter()
        .map(|p| {
            let base_opts = opts.integrator;
            let mut bigger = p.spec.clone();
            bigger.config.n_fock += FOCK_STEP;
            let tight = IntegratorOptions {
                rel_tol: base_opts.rel_tol / 2.0,
                abs_tol: base_opts.abs_tol / 2.0,
                ..base_opts
            };
            let variants = [
                ("baseline", &p.spec, base_opts),
                ("fock_plus_5", &bigger, base_opts),
                ("tolerance_halved", &p.spec, tight),
            ];
            let mut traces = Vec::with_capacity(3);
            for (_, s, o) in &variants {
                traces.push(simulate(s, o)?.0);
            }
            Ok(variants
                .iter()
                .zip(&traces)
                .map(|((label, s, o), t)| {
                    let last = t.len() - 1;
                    ConvergenceRow {
                        point: p.index,
                        comparison: label,
                        n_fock: s.config.n_fock,
                        rel_tol: o.rel_tol,
                        abs_tol: o.abs_tol,
                        final_concurrence: t.concurrence[last],
                        final_p_q1: t.p_q1[last],
                        final_p_q2: t.p_q2[last],
                        max_delta: t.max_delta(&traces[0]),
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ConvergenceRow> = per_point.into_iter().flatten().collect();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.point.to_string(),
                r.comparison.to_string(),
                r.n_fock.to_string(),
                r.rel_tol.to_string(),
                r.abs_tol.to_string(),
                fmt_float(r.final_concurrence),
                fmt_float(r.final_p_q1),
                fmt_float(r.final_p_q2),
                fmt_float(r.max_delta),
            ]
        })
        .collect();
    let path = write_table(
        &opts.output_dir.join(format!("{}_convergence.csv", spec.name)),
        &[
            "point",
            "comparison",
            "n_fock",
            "rel_tol",
            "abs_tol",
            "concurrence",
            "p_q1",
            "p_q2",
            "max_delta",
        ],
        &table,
    )?;
    Ok(ConvergenceReport { rows, path })
}

/// Origin of an analytic row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Adaptive quadrature of the second-order integrals.
    Quadrature,
    /// Truncated Bessel series (quarter-wavelength pair only).
    Series,
    /// g²T²[J₂(π/2) − J₂(π/4)²] (resonant pair only).
    ClosedForm,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Quadrature => "quadrature",
            Self::Series => "series",
            Self::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticsRow {
    pub point: usize,
    /// Cavity periods.
    pub time: f64,
    pub origin: Origin,
    pub concurrence: f64,
    pub p_q1: f64,
    pub p_q2: f64,
    pub abs_x: f64,
}

#[derive(Debug, Clone)]
pub struct AnalyticsReport {
    pub rows: Vec<AnalyticsRow>,
    pub path: PathBuf,
}

fn analytic_rows(point: usize, spec: &ScenarioSpec) -> Result<Vec<AnalyticsRow>> {
    let base = PerturbativeInput::from_config(&spec.config, 0.0)?;
    let pair = analytics::bessel_x(&base.with_time(1.0)).is_ok();
    let resonant = pair
        && base.delta == 0.0
        && base.omega_q == 1.0
        && base.profiles[0].omega_d == 1.0
        && base.g[0] == base.g[1];
    let mut rows = Vec::new();
    for t in spec.sample_times() {
        let input = base.with_time(2.0 * PI * t);
        let r = analytics::perturbative_concurrence(&input)?;
        rows.push(AnalyticsRow {
            point,
            time: t,
            origin: Origin::Quadrature,
            concurrence: r.concurrence(),
            p_q1: analytics::numeric_pe(&input, 0, false)?,
            p_q2: analytics::numeric_pe(&input, 1, false)?,
            abs_x: r.x.norm(),
        });
        if pair {
            let x = analytics::bessel_x(&input)?.norm();
            let pe = analytics::bessel_pe(&input)?;
            rows.push(AnalyticsRow {
                point,
                time: t,
                origin: Origin::Series,
                concurrence: 2.0 * (x - pe).max(0.0),
                p_q1: f64::NAN,
                p_q2: pe,
                abs_x: x,
            });
        }
        if resonant {
            rows.push(AnalyticsRow {
                point,
                time: t,
                origin: Origin::ClosedForm,
                concurrence: analytics::resonant_concurrence(base.g[0], input.t_total),
                p_q1: f64::NAN,
                p_q2: f64::NAN,
                abs_x: f64::NAN,
            });
        }
    }
    Ok(rows)
}

/// Second-order estimates from |g g 0⟩ over each point's sample times,
/// written as `<name>_analytics.csv` with the trace columns followed by
/// `origin`, `abs_x` and `point`. Columns without a value hold NaN.
pub fn analytics_report(spec: &ScenarioSpec, opts: &RunOptions) -> Result<AnalyticsReport> {
    let points = spec.points()?;
    let per_point: Vec<Vec<AnalyticsRow>> = points
        .par_iter()
        .map(|p| analytic_rows(p.index, &p.spec))
        .collect::<Result<_>>()?;
    let rows: Vec<AnalyticsRow> = per_point.into_iter().flatten().collect();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_float(r.time),
                fmt_float(r.concurrence),
                fmt_float(r.p_q1),
                fmt_float(r.p_q2),
                fmt_float(f64::NAN),
                fmt_float(f64::NAN),
                r.origin.as_str().to_string(),
                fmt_float(r.abs_x),
                r.point.to_string(),
            ]
        })
        .collect();
    let path = write_table(
        &opts.output_dir.join(format!("{}_analytics.csv", spec.name)),
        &[
            "time",
            "concurrence",
            "p_q1",
            "p_q2",
            "n_photons",
            "purity",
            "origin",
            "abs_x",
            "point",
        ],
        &table,
    )?;
    Ok(AnalyticsReport { rows, path })
}
