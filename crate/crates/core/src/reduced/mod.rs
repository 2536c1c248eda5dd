//! Reductions of the full dynamics: pair-to-doublon couplings, reduced
//! equations of motion, closed-form bound states and the four-body model.

pub mod closed;
pub mod coupling;
pub mod fourbody;
pub mod ode;
pub mod pair;

pub use closed::{
    dbs_closed_form, self_energy_and_residue, sigma_e, spbs_closed_form, spbs_length, DbsClosedForm, ResidueResult,
    SpbsClosedForm,
};
pub use coupling::{coupling_g, mode_overlap_m, ring_photon_green, ring_size, DoublonCoupling, DoublonRing};
pub use fourbody::{condition_check, edge_prefactor, four_body_model, pair_delta, pair_distance, ConditionFlags, FourBodyModel};
pub use ode::{eliminated_evolve, eliminated_generator, reduced_generator, reduced_ode_evolve, ReducedTrace};
pub use pair::EmitterPair;
