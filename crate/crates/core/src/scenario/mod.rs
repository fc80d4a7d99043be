//! Scenario files, built-in presets, runs with CSV output and refinement studies.

pub mod config;
pub mod converge;
pub mod csv;
pub mod presets;
pub mod run;

pub use config::{parse_config, ConfigError, ConfigErrors, Equation, ScenarioConfig};
pub use converge::{convergence_study, ConvergenceRow};
pub use presets::{preset_text, PRESET_NAMES};
pub use run::{run_scenario, simulate, steady_report, RunReport, ScenarioError, Summary};
