//! Scenario runner, CSV emitter and stage-stepping REPL.

pub mod omega_csv;
pub mod repl;
pub mod scenario;

pub use omega_csv::{emit_omega_csv, write_omega_csv};
pub use scenario::{run_scenario, run_scenario_str, ScenarioError, ScenarioReport};
