//! Shared fixtures for the criterion benchmarks.

use permzne::ansatz::{build_hea, Circuit, Topology};
use permzne::hamiltonian::{build_tfim_kind, PauliHamiltonian, TfimKind};

/// Ring ansatz and type-(a) Ising Hamiltonian with deterministic, non-trivial
/// parameters.
pub fn ring_fixture(n: usize, depth: usize) -> (Circuit, PauliHamiltonian, Vec<f64>) {
    let circuit = build_hea(n, depth, Topology::Ring).expect("valid ansatz");
    let h = build_tfim_kind(n, TfimKind::A).expect("valid Hamiltonian");
    let theta = (0..circuit.num_params()).map(|i| 0.1 + 0.37 * (i as f64).sin()).collect();
    (circuit, h, theta)
}
