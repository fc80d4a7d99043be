//! Runs a parsed scenario and writes its CSV files.

use super::config::{ConfigErrors, Equation, ScenarioConfig};
use super::csv;
use crate::ddm::{ActivityMethod, ConvolutionWeights, DdmOptions, DdmSolver};
use crate::error::Error;
use crate::initial::discretize_initial;
use crate::itm::{ItmOptions, ItmSolver};
use crate::steady::{stationary_flux_roots, SteadyOptions};
use crate::trajectory::Trajectory;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),
    #[error("{0}")]
    Solver(#[from] Error),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

fn io_error(path: &Path, e: std::io::Error) -> ScenarioError {
    ScenarioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn method_name(cfg: &ScenarioConfig) -> &'static str {
    match cfg.method {
        None => "upwind",
        Some(ActivityMethod::Convolution(ConvolutionWeights::Trapezoid)) => "convolution-trapezoid",
        Some(ActivityMethod::Convolution(ConvolutionWeights::UniformHalf)) => {
            "convolution-uniform-half"
        }
        Some(ActivityMethod::ExponentialOde) => "ode",
        Some(ActivityMethod::DelayShift) => "delay-shift",
    }
}

/// Runs the scenario in memory, recording snapshots at the configured times.
pub fn simulate(cfg: &ScenarioConfig) -> crate::Result<Trajectory> {
    let grid = cfg.grid()?;
    let n0 = discretize_initial(&cfg.initial, &grid)?;
    let snapshot_times = cfg.output.snapshots.clone();
    match cfg.equation {
        Equation::Itm => {
            let opts = ItmOptions {
                policy: cfg.policy,
                flux_solve: cfg.flux_solve,
                scan: cfg.scan(),
                snapshot_times,
            };
            ItmSolver::new(&cfg.model, &grid, opts)?.run(n0)
        }
        Equation::Ddm => {
            let kernel = cfg
                .kernel
                .ok_or_else(|| Error::invalid("delayed model without a kernel"))?
                .kernel;
            let method = cfg
                .method
                .ok_or_else(|| Error::invalid("delayed model without an activity method"))?;
            let opts = DdmOptions {
                method,
                scan: cfg.scan(),
                snapshot_times,
            };
            DdmSolver::new(&cfg.model, &kernel, &grid, opts)?.run(n0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowUpSummary {
    pub time: f64,
    pub activity: f64,
}

/// One-line run report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub equation: &'static str,
    pub method: &'static str,
    pub ds: f64,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub final_flux: f64,
    pub final_activity: Option<f64>,
    /// Distance from the final flux to the nearest stationary flux.
    pub steady_state_distance: Option<f64>,
    pub jump_count: usize,
    pub min_psi: f64,
    pub mass_drift: f64,
    pub blow_up: Option<BlowUpSummary>,
    pub wall_time_s: f64,
}

impl Summary {
    pub fn from_run(cfg: &ScenarioConfig, traj: &Trajectory, wall_time_s: f64) -> Self {
        let final_flux = traj.final_flux();
        let steady = SteadyOptions {
            coupling: cfg.coupling(),
            scan: cfg.scan(),
            ..SteadyOptions::default()
        };
        let steady_state_distance =
            stationary_flux_roots(&cfg.model, &steady)
                .ok()
                .and_then(|roots| {
                    roots
                        .iter()
                        .map(|r| (r - final_flux).abs())
                        .reduce(f64::min)
                });
        Self {
            scenario: cfg.name.clone(),
            equation: cfg.equation.name(),
            method: method_name(cfg),
            ds: cfg.ds,
            dt: cfg.dt,
            steps: traj.steps(),
            final_time: traj.final_time(),
            final_flux,
            final_activity: traj.activity.last().copied(),
            steady_state_distance,
            jump_count: traj.jump_count(),
            min_psi: traj.min_psi(),
            mass_drift: traj.mass_drift(),
            blow_up: traj
                .blow_up()
                .map(|(time, activity)| BlowUpSummary { time, activity }),
            wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub trajectory: Trajectory,
    pub summary: Summary,
    pub flux_path: PathBuf,
    pub density_path: PathBuf,
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), ScenarioError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_error(path, e))
}

/// Runs the scenario and writes the flux and density CSVs under `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, ScenarioError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let start = Instant::now();
    let trajectory = simulate(cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let flux_path = out_dir.join(&cfg.output.flux);
    let density_path = out_dir.join(&cfg.output.density);
    write_file(&flux_path, |w| csv::write_flux(w, cfg, &trajectory))?;
    write_file(&density_path, |w| csv::write_density(w, cfg, &trajectory))?;
    let summary = Summary::from_run(cfg, &trajectory, wall);
    Ok(RunReport {
        trajectory,
        summary,
        flux_path,
        density_path,
    })
}

/// Stationary fluxes of the scenario's model as a JSON line.
pub fn steady_report(cfg: &ScenarioConfig) -> crate::Result<String> {
    let opts = SteadyOptions {
        coupling: cfg.coupling(),
        scan: cfg.scan(),
        ..SteadyOptions::default()
    };
    let roots = stationary_flux_roots(&cfg.model, &opts)?;
    #[derive(Serialize)]
    struct Steady<'a> {
        scenario: &'a str,
        coupling: f64,
        roots: &'a [f64],
    }
    Ok(serde_json::to_string(&Steady {
        scenario: &cfg.name,
        coupling: opts.coupling,
        roots: &roots,
    })
    .expect("steady report serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::parse_config;

    #[test]
    fn short_run_writes_both_files() {
        let cfg =
            parse_config("[scenario]\npreset = example1-itm\nname = short\n[grid]\nT = 0.5\n")
                .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let r = run_scenario(&cfg, dir.path()).unwrap();
        assert!(r.flux_path.ends_with("short_flux.csv"));
        let flux = std::fs::read_to_string(&r.flux_path).unwrap();
        assert_eq!(
            flux.lines().filter(|l| !l.starts_with('#')).count(),
            r.trajectory.times.len() + 1
        );
        let json: serde_json::Value = serde_json::from_str(&r.summary.to_json()).unwrap();
        assert_eq!(json["scenario"], "short");
        assert_eq!(json["jump_count"], 0);
        assert!(json["blow_up"].is_null());
    }

    #[test]
    fn steady_report_lists_roots() {
        let cfg = parse_config("[scenario]\npreset = example2-itm\n").unwrap();
        let v: serde_json::Value = serde_json::from_str(&steady_report(&cfg).unwrap()).unwrap();
        let r = v["roots"].as_array().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].as_f64().unwrap() - 0.8186).abs() < 5e-4);
    }
}
