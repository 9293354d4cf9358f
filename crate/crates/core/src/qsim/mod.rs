//! Dense simulation engine.
//!
//! Conventions, fixed crate-wide:
//!
//! - `RY(t) = exp(-i t Y / 2)`, `RX(t) = exp(-i t X / 2)`,
//!   `RZZ(t) = exp(-i t Z⊗Z / 2)`.
//! - Qubit 0 is the least significant bit of an amplitude index.
//! - A density matrix is stored row-major; in its flat index the column
//!   qubits occupy bits `0..n` and the row qubits bits `n..2n`.

mod density;
mod gate;
pub(crate) mod kernels;
mod noisy;
mod statevector;

pub use density::{CptpReport, DensityMatrix, MAX_DENSITY_QUBITS};
pub use gate::{Gate, GateKind};
pub use noisy::{run_noisy_circuit, run_statevector, run_with_rates, ChannelKind};
pub use statevector::{StateVector, MAX_STATEVECTOR_QUBITS};

pub use num_complex::Complex64;
