use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use accelrad::scenario::config::load;
use accelrad::scenario::runner::resolve_output_dir;
use accelrad::scenario::{
    analytics_report, convergence_report, preset, run, sweep_concurrence_map, RunOptions,
    ScenarioSpec,
};

#[derive(Parser)]
#[command(name = "accelrad", version, about = "Two qubits with modulated cavity coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve every sweep point and write one CSV per point plus a manifest.
    Run(Common),
    /// Concurrence map over a grid of drive frequencies.
    SweepMap {
        #[command(flatten)]
        common: Common,
        /// Qubit-1 drive frequencies.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,2.5")]
        omega_d1: Vec<f64>,
        /// Qubit-2 drive frequencies.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,2.5")]
        omega_d2: Vec<f64>,
        /// Probe time in cavity periods; defaults to the end of the window.
        #[arg(long)]
        probe: Option<f64>,
    },
    /// Rerun each point at N + 5 and at halved tolerances.
    Converge(Common),
    /// Second-order X, P_e and concurrence over the sample times.
    Analytics(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario configuration file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (default: $ACCELRAD_OUTPUT_DIR/<name> or output/<name>).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cavity Fock cutoff N.
    #[arg(long)]
    fock: Option<usize>,
    /// Duration in cavity periods.
    #[arg(long)]
    t_final: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn resolve(&self) -> accelrad::Result<(ScenarioSpec, RunOptions)> {
        let spec = match (&self.config, &self.preset) {
            (Some(path), _) => load(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => unreachable!("clap requires one of --config/--preset"),
        };
        let spec = spec.with_overrides(self.fock, self.t_final, self.samples);
        spec.validate()?;
        let dir = resolve_output_dir(&spec, self.output.as_deref());
        Ok((spec, RunOptions::new(dir)))
    }
}

fn execute(cli: Cli) -> accelrad::Result<bool> {
    match cli.command {
        Command::Run(common) => {
            let (spec, opts) = common.resolve()?;
            let report = run(&spec, &opts)?;
            for p in &report.points {
                if let Some(e) = &p.error {
                    eprintln!("point {}: {e}", p.index);
                }
            }
            for path in report.paths() {
                println!("{}", path.display());
            }
            Ok(report.all_ok())
        }
        Command::SweepMap {
            common,
            omega_d1,
            omega_d2,
            probe,
        } => {
            let (spec, opts) = common.resolve()?;
            let probe = probe.unwrap_or(spec.t_final);
            let map = sweep_concurrence_map(&spec, &omega_d1, &omega_d2, probe, &opts)?;
            println!("{}", map.path.display());
            Ok(true)
        }
        Command::Converge(common) => {
            let (spec, opts) = common.resolve()?;
            let report = convergence_report(&spec, &opts)?;
            println!("{}", report.path.display());
            Ok(true)
        }
        Command::Analytics(common) => {
            let (spec, opts) = common.resolve()?;
            let report = analytics_report(&spec, &opts)?;
            println!("{}", report.path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more sweep points FAILED; see the manifest");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
