//! Computes guaranteed upper and lower bounds on the effective 7x7
//! poroelastic constitutive matrix of a voxelized representative volume
//! element (RVE), via finite-element solves under the two families of
//! homogeneous boundary conditions, plus two-point statistics that
//! diagnose whether the sample is large enough to be representative.

pub mod bounds;
pub mod cli;
pub mod contracted;
pub mod error;
pub mod fem;
pub mod material;
pub mod microstructure;
pub mod report;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
