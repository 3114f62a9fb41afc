//! Scenario runner, telemetry, metrics and calibration.

pub mod calibrate;
pub mod compare;
pub mod config;
pub mod metrics;
pub mod run;
pub mod scenario;
pub mod serve;
pub mod telemetry;

pub use compare::{compare, render_table, run_pair, CompareError, Comparison, PairResult, RunReport};
pub use config::{ConfigError, Ini, SimConfig};
pub use metrics::{compute_metrics, fit_circle, fit_turn, FitError, RunMetrics, TurnFit, TurnSide};
pub use run::{run, PayloadCommand, RunEnd, RunOptions, RunResult, Simulation};
pub use scenario::{FinsChoice, NavMode, Scenario, TICK};
pub use telemetry::{read_csv, write_csv, TelemetryError, TelemetryRow};
