//! Parameters, bases and sparse Hamiltonians.

pub mod basis;
pub mod hamiltonian;
pub mod params;
pub mod sparse;

pub use basis::{DoubleExcitationBasis, Label, TwoPhotonBasis};
pub use hamiltonian::{build_full_hamiltonian, build_two_photon_hamiltonian};
pub use params::{Boundary, Emitter, EmitterSet, Stagger, WaveguideParams};
pub use sparse::{CsrMatrix, SparseOperator};
