//! Zero-noise extrapolation for variational eigensolvers, where the noise
//! strength is varied by permuting the mapping from circuit qubits to device
//! qubits.
//!
//! The crate is organised bottom-up:
//!
//! - [`qsim`]: dense statevector and density-matrix engine with two-qubit
//!   depolarizing channels.
//! - [`ansatz`]: layered hardware-efficient circuits and their interaction
//!   multigraph statistics.
//! - [`hamiltonian`]: Pauli-sum Hamiltonians, the transverse-field Ising family
//!   and exact spectra.
//! - [`noise`]: error-rate tables, qubit permutations and circuit error sums.
//! - [`vqe`]: noiseless variational optimisation (L-BFGS on exact gradients).
//! - [`perturbation`]: first-order energy expansion and deviation bounds.
//! - [`zne`]: least-squares extrapolation over permutations, BCa bootstrap and
//!   permutation-moment diagnostics.

pub mod ansatz;
pub mod error;
pub mod hamiltonian;
pub mod noise;
pub mod perturbation;
pub mod qsim;
pub mod rng;
pub mod vqe;
pub mod zne;

pub use perturbation::{DeviationBounds, PerturbationProfile};
pub use vqe::{VqeOptions, VqeOutcome};
pub use zne::{EnergyMode, FitOutcome, LinearFit, ZneResult};

pub use ansatz::{build_hea, multigraph_stats, Circuit, MultigraphStats, Topology};
pub use error::{Error, Result};
pub use hamiltonian::{build_tfim, Pauli, PauliHamiltonian, PauliString, TfimKind};
pub use noise::{ErrorModel, Permutation};

pub use qsim::{DensityMatrix, Gate, GateKind, StateVector};


