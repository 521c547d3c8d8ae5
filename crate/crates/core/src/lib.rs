//! Numerical laboratory for programming Hamiltonian ground states.
//!
//! Boolean problems become diagonal Pauli operators, many-body terms are
//! reduced to two-body ones by exact and perturbative gadgets, and
//! variational circuits are simulated exactly on small registers.

pub mod boolean;
pub mod circuit;
pub mod clock;
pub mod clifford;
pub mod dense;
pub mod error;
pub mod evolve;
pub mod gadgets;
pub mod io;
pub mod lp;
pub mod optimize;
pub mod pauli;
pub mod reductions;
pub mod state;
pub mod variational;
pub mod walks;

pub use clifford::{clifford_conjugate, CliffordCircuit, CliffordGate};
pub use dense::{ground, is_stoquastic, realize_dense, DenseOperator, GroundState};
pub use error::{Error, Result};
pub use evolve::{evolve, evolve_stochastic, trotter_evolve};
pub use pauli::{Letter, OperatorSum, PauliString, PauliSum, Phase};
pub use state::{expectation, StateVector};
