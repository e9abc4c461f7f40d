//! Entanglement and topological-order diagnostics for the Bloch sphere spanned
//! by a toric-code ground state and its closest product state.

pub mod bloch;
pub mod classify;
pub mod error;
pub mod grover;
pub mod lattice;
pub mod oracle;
pub mod precision;
pub mod purity;
pub mod topo;
pub mod verify;

pub use error::{Error, Result};
