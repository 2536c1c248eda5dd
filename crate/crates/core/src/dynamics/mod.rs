//! Full time evolution of emitters plus waveguide in the double-excitation
//! sector, and the observables read off it.

pub mod evolve;
pub mod extract;
pub mod setup;
pub mod state;

pub use evolve::{evolve, Diagnostics, DynamicsResult, EvolveConfig, ProjectionWindows, StationaryField, DEFAULT_DRIFT_TOL};
pub use extract::{
    dbs_field, extract_dbs_field, extract_g2, extract_spbs_profile, g2_correlation, spbs_profile, BoundStateProfile,
    CorrelationFunction, DbsField, DbsWindow, LengthFit, DEFAULT_DENSITY_THRESHOLD, DEFAULT_SPBS_WINDOW, SIGNAL_FLOOR,
};
pub use setup::{centre_plus_site, emitter_pair, lamb_shift, omega_for_delta, pair_lamb_shift, DetuningConvention};
pub use state::StateVector;
