//! Closed-form doublon band theory.

pub mod bands;
pub mod green;
pub mod wavefunction;

pub use bands::{
    band_edges_k0, branch_energy, default_k_grid, dispersion_det, fit_alpha, relative_edge, solve_bands, BandStructure,
    Branch, CurvatureFit, DEFAULT_ALPHA_SAMPLES, DEFAULT_ALPHA_WINDOW,
};
pub use green::{correlation_length, correlation_length_k0, green_f, Channel, ChannelGreen, K0};
pub use wavefunction::{AmplitudeGrid, DoublonWavefunction};
