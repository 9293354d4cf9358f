use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::statevector::StateVector;
use crate::ansatz::Circuit;
use crate::error::Result;
use crate::noise::{check_sizes, ErrorModel, Permutation};

/// The map `E` applied with probability `q` after a two-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Replace the pair's reduced state with `I/4`.
    #[default]
    Depolarizing,
}

impl ChannelKind {
    pub fn apply(self, rho: &mut DensityMatrix, pair: (usize, usize), q: f64) -> Result<()> {
        match self {
            ChannelKind::Depolarizing => rho.apply_depolarizing(pair, q),
        }
    }
}

/// Noiseless `U(theta)|0...0>`.
pub fn run_statevector(circuit: &Circuit, params: &[f64]) -> Result<StateVector> {
    circuit.check_params(params)?;
    let mut psi = StateVector::zero(circuit.num_qubits())?;
    for g in circuit.gates(params) {
        psi.apply_gate(&g)?;
    }
    Ok(psi)
}

/// Density-matrix run where the two-qubit gate in `layer` on pair index `pair`
/// is followed by `channel` with rate `rate(layer, pair)`. Single-qubit gates
/// are noiseless.
pub fn run_with_rates<F>(
    circuit: &Circuit,
    params: &[f64],
    channel: ChannelKind,
    rate: F,
) -> Result<DensityMatrix>
where
    F: Fn(usize, usize) -> f64,
{
    circuit.check_params(params)?;
    let mut rho = DensityMatrix::zero(circuit.num_qubits())?;
    for slot in circuit.slots() {
        rho.apply_gate(&slot.gate(params))?;
        if let Some(p) = slot.pair {
            let q = rate(slot.layer, p);
            if q != 0.0 {
                channel.apply(&mut rho, (slot.targets[0], slot.targets[1]), q)?;
            }
        }
    }
    Ok(rho)
}

/// Exact noisy state when circuit qubit `j` sits on physical qubit
/// `mapping(j)`: the gate on `(j, k)` suffers `q[mapping(j)][mapping(k)]`.
pub fn run_noisy_circuit(
    circuit: &Circuit,
    params: &[f64],
    model: &ErrorModel,
    mapping: &Permutation,
) -> Result<DensityMatrix> {
    check_sizes(circuit, model, mapping)?;
    let rates: Vec<f64> = circuit
        .pairs()
        .iter()
        .map(|&(j, k)| model.pulled_back(mapping, j, k))
        .collect();
    run_with_rates(circuit, params, model.channel, |_, p| rates[p])
}
