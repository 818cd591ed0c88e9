//! Configuration loading, parameter sweeps and CSV output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod presets;
pub mod selftest;

pub use config::{load_config, load_config_with, parse_config, ExperimentSpec, Overrides};
pub use experiment::{evaluate_point, run_experiment, MetricCurve};
pub use output::{emit_csv, read_csv};
pub use presets::Preset;
