//! Run configuration, parameter sweeps and file output behind the CLI.

pub mod config;
pub mod fourbody;
pub mod layout;
pub mod output;
pub mod runners;

pub use config::{AxisSpec, DetuningUnit, Experiment, RunConfig, OUT_DIR_ENV};
pub use fourbody::{
    first_transfer_maximum, run_detuning_sweep, run_dq_sweep, run_fourbody, run_fourbody_config, FourBodyPoint, FourBodyRun,
    FourBodySettings, SweepResult, SCHEMA_VERSION,
};
pub use layout::two_pair_layout;
pub use output::{emit_outputs, fmt_f64, svg_heatmap, svg_lines, write_csv, Metadata, Series, Style, Table};
pub use runners::{analyse_dynamics, run_bands, run_dynamics, run_fourbody_cmd, run_spectrum, run_sweep_cmd, sweep_table, DynamicsAnalysis};
