//! Two-fermion wavepacket collisions on a Hubbard ring.
//!
//! Exact lattice dynamics ([`hamiltonian`], [`propagator`]) are compared with a
//! factorized description where the orbital part follows from the Bethe
//! solution ([`bethe`]) and the spin part from a two-spin S-matrix ([`spin`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bethe;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod metrics;
pub mod propagator;
pub mod sparse;
pub mod spin;
pub mod wavepacket;

pub use basis::{enumerate_sector, ManyBodyState, SectorBasis, Spin};
pub use error::{Error, Result};
pub use sparse::SparseOperator;
