//! Doublons of a staggered Kerr waveguide and the emitter pairs dressed by them.

pub mod dense;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod lanczos;
pub mod model;
pub mod propagate;
pub mod reduced;
pub mod spectrum;
pub mod sweep;
pub mod theory;

pub use error::{Error, Result};
