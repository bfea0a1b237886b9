//! Dense statevector simulation over a small register file.
//!
//! Basis indices are little-endian: qubit `k` contributes `2^k`.

mod circuit;
mod gate;
mod state;

pub use circuit::{Block, Circuit, GateStats};
pub use gate::{Control, Gate, GateKind, Qubit};
pub use state::{StateVector, MAX_QUBITS};
