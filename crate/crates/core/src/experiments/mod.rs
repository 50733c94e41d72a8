//! Scenario runner: spectra, bounds and test-function quotients over parameter and
//! resolution lists, reported as CSV.

pub mod config;
pub mod report;
pub mod scenarios;

pub use config::{CurveSpec, DomainConfig, ScenarioConfig};
pub use report::{Report, Row, COLUMNS};
pub use scenarios::{
    flux_sweep, run_scenario, sweep, test_function_rayleigh, verify_steps_for, SweepParam, TestFunction,
    TestFunctionReport,
};
