//! Toolkit for engineering and certifying quantum state transfer in 1-D spin
//! chains, restricted to the single-excitation subspace where the Hamiltonian
//! acts as a real symmetric tridiagonal matrix on site amplitudes.
//!
//! The crate is organized around a pipeline: describe a chain
//! ([`chain_model`]), diagonalize and simulate it ([`spectral`]), certify what
//! its spectrum can or cannot do with exact integer arithmetic ([`exact`],
//! [`criteria`]), build the known analytic coupling families
//! ([`constructions`]), and assemble end-to-end transfer plans that trade
//! evolution time against fidelity ([`pgt_route`]).

pub mod chain_model;
pub mod constructions;
pub mod criteria;
pub mod exact;
pub mod pgt_route;
pub mod spectral;

mod phase;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong lengths, non-positive couplings, bad ordering.
    #[error("validation: {0}")]
    Validation(String),
    /// A spectrum that cannot be realized by the requested chain class.
    #[error("not realizable: {0}")]
    Unrealizable(String),
    /// A requested plan or construction has no solution under its constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
