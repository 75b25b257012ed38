//! Control Hamiltonians `H(t) = H0 + ξ(t) μ`, their product-formula and
//! exact evolution, and the operator encodings of `μ` used by transition
//! amplitude estimation.

mod encoding;
mod evolve;
mod pulse;

pub use encoding::{build_block_encoding, lcu_decompose, BlockEncoding, LcuDecomposition};
pub use evolve::{
    dense_exponential, exact_evolve, exact_propagator, operator_distance, spectral_norm,
    trotter_error_bound, trotter_evolve, trotter_evolve_range, trotter_propagator, Direction,
    Evolution, TrotterOrder, TrotterPlan, DENSE_CAP,
};
pub use pulse::{ControlHamiltonian, PulseSequence};
