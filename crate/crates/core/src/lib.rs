//! Finite-lattice 2D SSH model on a square lattice with intracell
//! next-nearest-neighbour (B-C) hopping.
//!
//! The crate is `no_std` (it needs `alloc`). It covers Hamiltonian
//! assembly with optional disorder, dense diagonalization, the damped
//! resolvent and local density of states, corner/edge/bulk state
//! classification, the decomposition of the `gamma = 0` lattice into
//! disconnected fragments, and deterministic sweep / ensemble drivers.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod banded;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod fragments;
pub mod hamiltonian;
pub mod lattice;
pub mod spectral;

pub use error::{Error, Result};
pub use hamiltonian::{
    build_hamiltonian, sample_disorder, sample_disorder_with, Bond, BondKind, DisorderMode,
    DisorderRealization, HamiltonianMatrix,
};
pub use lattice::{site_index, site_position, Corner, ModelParams, SiteId, Species};
pub use spectral::{eigendecompose, EnergyGrid, LdosResult, Spectrum};
