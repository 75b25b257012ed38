//! Statevector simulation of ancilla-based overlap and transition-amplitude
//! estimation, and the quantum optimal-control loops built on them.

pub mod analysis;
pub mod cli;
pub mod control;
pub mod error;
pub mod hamiltonian;
pub mod ledger;
pub mod pauli;
pub mod primitives;
pub mod sampling;
pub mod statevector;

pub use error::{Error, Result};
