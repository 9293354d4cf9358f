//! First-order expansion of the noisy energy in the error rates.
//!
//! With `E0` the noiseless energy and `E[l][p]` the energy when the full
//! channel follows only the two-qubit gate on pair `p` in layer `l`,
//!
//! ```text
//! E ≈ E0 + (A - E0) * CES + sum_p eps_tilde[p] * q_p
//! ```
//!
//! where `A` is the mean of all `E[l][p]`, `eps[l][p] = E[l][p] - A`,
//! `eps_tilde[p] = sum_l eps[l][p]` and `q_p` is the rate the pair feels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{arg, Error, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::noise::{check_sizes, pair_rate_sum, ErrorModel, Permutation};
use crate::qsim::{run_statevector, run_with_rates, ChannelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationProfile {
    pub e0: f64,
    pub depth: usize,
    pub pairs: Vec<(usize, usize)>,
    /// `insertion[l][p]`: energy with one channel after gate `(l, p)`.
    pub insertion: Vec<Vec<f64>>,
    /// Mean insertion energy `A`.
    pub mean: f64,
    pub eps: Vec<Vec<f64>>,
    pub eps_tilde: Vec<f64>,
}

impl PerturbationProfile {
    /// Assemble from raw insertion energies.
    pub fn from_insertions(e0: f64, pairs: Vec<(usize, usize)>, insertion: Vec<Vec<f64>>) -> Result<Self> {
        let depth = insertion.len();
        if depth == 0 || pairs.is_empty() || insertion.iter().any(|row| row.len() != pairs.len()) {
            return arg("insertion table must be depth x |T| and non-empty");
        }
        let count = (depth * pairs.len()) as f64;
        let mean = insertion.iter().flatten().sum::<f64>() / count;
        let eps: Vec<Vec<f64>> = insertion.iter().map(|row| row.iter().map(|e| e - mean).collect()).collect();
        let eps_tilde = (0..pairs.len()).map(|p| eps.iter().map(|row| row[p]).sum()).collect();
        Ok(PerturbationProfile { e0, depth, pairs, insertion, mean, eps, eps_tilde })
    }

    /// `A - E0`, the slope of energy against circuit error sum.
    pub fn delta(&self) -> f64 {
        self.mean - self.e0
    }

    pub fn max_abs_eps_tilde(&self) -> f64 {
        self.eps_tilde.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// `(1/d) sum_l E[l][p]`, the per-pair layer average.
    pub fn layer_average(&self) -> Vec<f64> {
        (0..self.pairs.len())
            .map(|p| self.insertion.iter().map(|row| row[p]).sum::<f64>() / self.depth as f64)
            .collect()
    }

    fn check_circuit(&self, circuit: &Circuit) -> Result<()> {
        if circuit.depth() != self.depth || circuit.pairs() != self.pairs.as_slice() {
            return arg("profile was computed for a different circuit");
        }
        Ok(())
    }

    /// Rows `(layer, j, k, energy, eps)` for plotting.
    pub fn insertion_rows(&self) -> Vec<(usize, usize, usize, f64, f64)> {
        let mut rows = Vec::with_capacity(self.depth * self.pairs.len());
        for (l, row) in self.insertion.iter().enumerate() {
            for (p, &e) in row.iter().enumerate() {
                rows.push((l, self.pairs[p].0, self.pairs[p].1, e, self.eps[l][p]));
            }
        }
        rows
    }
}

/// One noiseless run plus `|T| d` single-insertion runs with the full
/// depolarizing channel.
pub fn compute_profile(circuit: &Circuit, theta: &[f64], h: &PauliHamiltonian) -> Result<PerturbationProfile> {
    compute_profile_with(circuit, theta, h, ChannelKind::Depolarizing)
}

pub fn compute_profile_with(
    circuit: &Circuit,
    theta: &[f64],
    h: &PauliHamiltonian,
    channel: ChannelKind,
) -> Result<PerturbationProfile> {
    if h.num_qubits() != circuit.num_qubits() {
        return arg("Hamiltonian and circuit sizes differ");
    }
    if circuit.pairs().is_empty() {
        return arg("circuit has no two-qubit gates");
    }
    let e0 = run_statevector(circuit, theta)?.expectation(h)?;
    let npairs = circuit.pairs().len();
    let flat = (0..circuit.depth() * npairs)
        .into_par_iter()
        .map(|idx| {
            let (layer, pair) = (idx / npairs, idx % npairs);
            let rho = run_with_rates(circuit, theta, channel, |l, p| if (l, p) == (layer, pair) { 1.0 } else { 0.0 })?;
            rho.expectation(h)
        })
        .collect::<Result<Vec<f64>>>()?;
    let insertion = flat.chunks(npairs).map(<[f64]>::to_vec).collect();
    PerturbationProfile::from_insertions(e0, circuit.pairs().to_vec(), insertion)
}

/// Linear and deviation parts `(Δx, δy)` of the first-order energy shift.
pub fn first_order_parts(
    profile: &PerturbationProfile,
    circuit: &Circuit,
    model: &ErrorModel,
    pi: &Permutation,
) -> Result<(f64, f64)> {
    check_sizes(circuit, model, pi)?;
    profile.check_circuit(circuit)?;
    let ces = circuit.depth() as f64 * pair_rate_sum(circuit, model, pi);
    let deviation = circuit
        .pairs()
        .iter()
        .zip(&profile.eps_tilde)
        .map(|(&(j, k), e)| e * model.pulled_back(pi, j, k))
        .sum();
    Ok((profile.delta() * ces, deviation))
}

/// `E0 + (A - E0) CES + sum_p eps_tilde[p] q_p`.
pub fn first_order_energy(
    profile: &PerturbationProfile,
    circuit: &Circuit,
    model: &ErrorModel,
    pi: &Permutation,
) -> Result<f64> {
    let (linear, deviation) = first_order_parts(profile, circuit, model, pi)?;
    Ok(profile.e0 + linear + deviation)
}

/// Upper bounds on the relative deviation `|δy| / (Δx)` from the linear
/// trend. Both are non-negative; `bound` is their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationBounds {
    pub b1: f64,
    pub b2: f64,
    pub bound: f64,
}

/// Tolerance under which `A` and `E0` are considered equal.
pub const DEGENERATE_DELTA: f64 = 1e-12;

/// `B1 = max|eps_tilde| / (d |A - E0|)` and
/// `B2 = |T| max|eps_tilde| Diam{q} / (d |A - E0| sum q)`, where the rates are
/// those the circuit pairs feel under `pi`.
pub fn deviation_bounds(
    profile: &PerturbationProfile,
    model: &ErrorModel,
    pi: &Permutation,
    circuit: &Circuit,
) -> Result<DeviationBounds> {
    check_sizes(circuit, model, pi)?;
    profile.check_circuit(circuit)?;
    let delta = profile.delta();
    if delta.abs() <= DEGENERATE_DELTA {
        return Err(Error::DegenerateDenominator(delta));
    }
    let d = circuit.depth() as f64;
    let max_eps = profile.max_abs_eps_tilde();
    let rates: Vec<f64> = circuit.pairs().iter().map(|&(j, k)| model.pulled_back(pi, j, k)).collect();
    let (lo, hi) = rates.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    let diam = hi - lo;
    let sum: f64 = rates.iter().sum();
    let b1 = max_eps / (d * delta.abs());
    let b2 = if diam == 0.0 || max_eps == 0.0 {
        0.0
    } else {
        rates.len() as f64 * max_eps * diam / (d * delta.abs() * sum)
    };
    Ok(DeviationBounds { b1, b2, bound: b1.min(b2) })
}

/// Measured `|δy| / |Δx|`; zero when there is no noise at all.
pub fn relative_deviation(
    profile: &PerturbationProfile,
    circuit: &Circuit,
    model: &ErrorModel,
    pi: &Permutation,
) -> Result<f64> {
    let (linear, deviation) = first_order_parts(profile, circuit, model, pi)?;
    if linear == 0.0 {
        return Ok(if deviation == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(deviation.abs() / linear.abs())
}
