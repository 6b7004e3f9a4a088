//! Lattice Klein-Gordon fields on 1+1 dimensional spacetimes, their
//! localization subspaces, and two quantizations of the phase space.

pub mod error;
pub mod exact;
pub mod kg;
pub mod lattice;
pub mod linalg;
pub mod locality;
pub mod poly;
pub mod scenario;
pub mod study;
pub mod symplectic;
pub mod tensor;
pub mod weyl;

pub use error::{Error, Result};
