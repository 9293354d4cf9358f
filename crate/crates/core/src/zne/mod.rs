//! Zero-noise extrapolation over qubit permutations.
//!
//! Each permutation yields one sample `(CES, E)`; an ordinary least-squares
//! line through the samples is evaluated at `CES = 0`. The slope is reported
//! against CES, so for the first-order model it estimates `A - E0`.

mod bootstrap;
mod fit;
mod moments;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{multigraph_stats, Circuit};
use crate::error::{arg, Error, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::noise::{circuit_error_sum, ErrorModel, Permutation};
use crate::perturbation::{compute_profile, first_order_energy, PerturbationProfile};
use crate::qsim::{run_noisy_circuit, run_statevector};

pub use bootstrap::{bootstrap_ci, BootstrapOptions, ConfidenceInterval, MIN_SAMPLES};
pub use fit::{linear_fit, LinearFit, DEGENERATE_SPREAD};
pub use moments::{
    covariance_decomposition, direct_covariance, permutation_moments, CovarianceDecomposition, PermutationMoments,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    /// Exact density-matrix simulation of the noisy circuit.
    ExactSim,
    /// First-order expansion from a perturbation profile.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Lexicographic rank of the permutation.
    pub permutation_lehmer: u64,
    pub ces: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitOutcome {
    Linear(LinearFit),
    /// Every sample has the same CES; the estimate is the mean energy.
    Degenerate { ces: f64, mean: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mean_ces: f64,
    pub mean_energy: f64,
    pub var_ces: f64,
    pub cov_ces_energy: f64,
    /// `min_pi (E - E0)`, the best raw noisy result.
    pub min_energy_shift: f64,
    pub moments: Option<PermutationMoments>,
    pub decomposition: Option<CovarianceDecomposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneResult {
    pub mode: EnergyMode,
    /// Noiseless energy at the same parameters.
    pub e0: f64,
    pub samples: Vec<Sample>,
    pub fit: FitOutcome,
    pub ci: Option<ConfidenceInterval>,
    pub diagnostics: Diagnostics,
}

impl ZneResult {
    /// Zero-noise estimate.
    pub fn intercept(&self) -> f64 {
        match self.fit {
            FitOutcome::Linear(f) => f.intercept,
            FitOutcome::Degenerate { mean, .. } => mean,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        match self.fit {
            FitOutcome::Linear(f) => Some(f.slope),
            FitOutcome::Degenerate { .. } => None,
        }
    }

    /// `|intercept - E0|`.
    pub fn error(&self) -> f64 {
        (self.intercept() - self.e0).abs()
    }

    /// How many times smaller the extrapolation error is than the best raw
    /// sample's error.
    pub fn improvement(&self) -> f64 {
        self.diagnostics.min_energy_shift.abs() / self.error()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.ces, s.energy)).collect()
    }

    pub fn attach_bootstrap(&mut self, opts: &BootstrapOptions) -> Result<()> {
        self.ci = Some(bootstrap_ci(&self.points(), opts)?);
        Ok(())
    }

    /// Fill in the permutation moments and, given a profile, the covariance
    /// decomposition. Skips the moments for fewer than four qubits.
    pub fn attach_moments(
        &mut self,
        circuit: &Circuit,
        model: &ErrorModel,
        profile: Option<&PerturbationProfile>,
    ) -> Result<()> {
        if model.num_qubits() < 4 {
            return Ok(());
        }
        let moments = permutation_moments(model)?;
        if let Some(profile) = profile {
            self.diagnostics.decomposition =
                Some(covariance_decomposition(profile, &multigraph_stats(circuit), &moments)?);
        }
        self.diagnostics.moments = Some(moments);
        Ok(())
    }
}

/// Evaluate the noisy energy for every permutation and fit.
///
/// In [`EnergyMode::FirstOrder`] the given profile is used, or computed when
/// absent; [`EnergyMode::ExactSim`] ignores it.
pub fn extrapolate(
    circuit: &Circuit,
    theta: &[f64],
    h: &PauliHamiltonian,
    model: &ErrorModel,
    perms: &[Permutation],
    mode: EnergyMode,
    profile: Option<&PerturbationProfile>,
) -> Result<ZneResult> {
    if perms.is_empty() {
        return arg("no permutations given");
    }
    circuit.check_params(theta)?;
    let e0 = run_statevector(circuit, theta)?.expectation(h)?;
    let samples = sample_energies(circuit, theta, h, model, perms, mode, profile)?;
    from_samples(mode, e0, samples)
}

/// One `(CES, E)` sample per permutation, evaluated in parallel and returned
/// in input order.
pub fn sample_energies(
    circuit: &Circuit,
    theta: &[f64],
    h: &PauliHamiltonian,
    model: &ErrorModel,
    perms: &[Permutation],
    mode: EnergyMode,
    profile: Option<&PerturbationProfile>,
) -> Result<Vec<Sample>> {
    let owned;
    let profile = match (mode, profile) {
        (EnergyMode::FirstOrder, None) => {
            owned = compute_profile(circuit, theta, h)?;
            Some(&owned)
        }
        (_, p) => p,
    };
    perms
        .par_iter()
        .map(|pi| {
            let ces = circuit_error_sum(circuit, model, pi)?;
            let energy = match (mode, profile) {
                (EnergyMode::ExactSim, _) => run_noisy_circuit(circuit, theta, model, pi)?.expectation(h)?,
                (EnergyMode::FirstOrder, Some(p)) => first_order_energy(p, circuit, model, pi)?,
                (EnergyMode::FirstOrder, None) => unreachable!("profile computed above"),
            };
            Ok(Sample { permutation_lehmer: pi.rank()?, ces, energy })
        })
        .collect()
}

/// Fit already collected samples.
pub fn from_samples(mode: EnergyMode, e0: f64, samples: Vec<Sample>) -> Result<ZneResult> {
    if samples.is_empty() {
        return arg("no samples");
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.ces, s.energy)).collect();
    let len = pts.len() as f64;
    let mean_ces = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_energy = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let var_ces = pts.iter().map(|p| (p.0 - mean_ces).powi(2)).sum::<f64>() / len;
    let cov_ces_energy = pts.iter().map(|p| (p.0 - mean_ces) * (p.1 - mean_energy)).sum::<f64>() / len;
    let min_energy_shift = pts.iter().map(|p| p.1 - e0).fold(f64::INFINITY, f64::min);
    let fit = if pts.len() < 2 {
        FitOutcome::Degenerate { ces: mean_ces, mean: mean_energy }
    } else {
        match linear_fit(&pts) {
            Ok(f) => FitOutcome::Linear(f),
            Err(Error::DegenerateDesign { value, .. }) => FitOutcome::Degenerate { ces: value, mean: mean_energy },
            Err(e) => return Err(e),
        }
    };
    Ok(ZneResult {
        mode,
        e0,
        samples,
        fit,
        ci: None,
        diagnostics: Diagnostics {
            mean_ces,
            mean_energy,
            var_ces,
            cov_ces_energy,
            min_energy_shift,
            moments: None,
            decomposition: None,
        },
    })
}

/// Write samples as `permutation_lehmer,ces,energy`.
pub fn write_samples_csv<W: std::io::Write>(samples: &[Sample], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in samples {
        w.serialize(s).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}
