//! Neural-network encoded variational quantum eigensolver.
//!
//! A small classical network maps Hamiltonian parameters `λ` to the rotation
//! angles of a fixed circuit; the network is trained jointly over many `λ`
//! by minimizing the summed energy, with exact gradients from an adjoint
//! statevector sweep.

pub mod active;
pub mod ansatz;
pub mod encoder;
pub mod error;
pub mod experiment;
pub mod gradients;
pub mod hamiltonian;
pub mod metrics;
pub mod state;
pub mod training;

pub use ansatz::{build_hea, build_mera, AnsatzFamily, Circuit};
pub use encoder::{Encoder, EncoderKind, EncoderSpec};
pub use error::{Error, Result};
pub use hamiltonian::{build_xxz, exact_ground_state, GroundState, HamiltonianFamily, Pauli, PauliString, PauliSum};
pub use state::{Gate, GateKind, StateVector};
