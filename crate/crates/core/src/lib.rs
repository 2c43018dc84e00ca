//! Discretized adiabatic ground-state tracking on parameterized quantum circuits.
//!
//! The Hamiltonian is deformed from a mixer `H0` towards a problem Hamiltonian
//! `H1` in `K` linear steps. At every step the circuit parameters are shifted by
//! the minimum-norm vector that keeps the energy stationary and the Hessian
//! positive semidefinite, using only derivatives measured at the previous
//! ground state.
//!
//! Module map:
//!
//! - [`pauli`]: weighted Pauli-string Hamiltonians and the problem encoders.
//! - [`statevector`]: dense exact simulation and expectation values.
//! - [`ansatz`]: hardware-efficient `R_y`/CZ circuits.
//! - [`derivatives`]: parameter-shift derivatives up to third order.
//! - [`shift_solver`]: assembly and solution of the per-step shift problem.
//! - [`driver`]: the `K`-step loop with per-step traces.
//! - [`vqe`]: gradient-descent and 2-SPSA baselines.
//! - [`oracle`]: exact diagonalization and figures of merit.
//! - [`instances`]: seeded problem generators and instance file formats.

pub mod ansatz;
pub mod derivatives;
pub mod driver;
pub mod error;
pub mod instances;
pub mod oracle;
pub mod pauli;
pub mod shift_solver;
pub mod statevector;
pub mod vqe;

pub use error::{Error, Result};

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 14;

/// Largest register handled by dense diagonalization in the oracle.
pub const MAX_ORACLE_QUBITS: usize = 12;
