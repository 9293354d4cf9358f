use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use permzne::hamiltonian::build_tfim_kind;
use permzne::noise::MAX_ENUMERATE;
use permzne::zne::{BootstrapOptions, EnergyMode};
use permzne::{build_tfim, PauliHamiltonian, TfimKind, Topology, VqeOptions};
use serde::{Deserialize, Serialize};

/// Default permutation-pool sizes for the repetition experiments.
pub const DEFAULT_POOL_SIZES: [usize; 6] = [5, 10, 20, 50, 100, 200];
pub const DEFAULT_Q_MAX_VALUES: [f64; 5] = [1e-4, 2e-4, 5e-4, 1e-3, 2e-3];
pub const MAX_AUTO_DEPTH: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Family {
        #[serde(rename = "type")]
        kind: Family,
    },
    Explicit {
        couplings: Vec<f64>,
        fields: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    A,
    B,
}

impl From<Family> for TfimKind {
    fn from(f: Family) -> Self {
        match f {
            Family::A => TfimKind::A,
            Family::B => TfimKind::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthSpec {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllTag {
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermutationSpec {
    All(AllTag),
    Sample { sample: SampleSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeConfig {
    #[serde(default = "default_pool")]
    pub pool_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: VqeOptions,
    /// Accept a depth once `E* - E_ground <= fraction * gap`.
    #[serde(default = "default_fraction")]
    pub depth_fraction: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            pool_size: default_pool(),
            seed: 0,
            options: VqeOptions::default(),
            depth_fraction: default_fraction(),
            max_depth: default_max_depth(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_q_values")]
    pub q_max_values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { q_max_values: default_q_values() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    /// Qubit counts; empty means the top-level `n`.
    #[serde(default)]
    pub n_values: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_pools")]
    pub pool_sizes: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig { n_values: vec![], repetitions: default_repetitions(), pool_sizes: default_pools(), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(default = "default_topology")]
    pub topology: Topology,
    pub hamiltonian: HamiltonianSpec,
    pub depth: DepthSpec,
    #[serde(default = "default_q_max")]
    pub q_max: f64,
    #[serde(default)]
    pub table_seed: u64,
    #[serde(default = "default_permutations")]
    pub permutations: PermutationSpec,
    #[serde(default = "default_energy_mode")]
    pub energy_mode: EnergyMode,
    #[serde(default)]
    pub vqe: VqeConfig,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: Option<BootstrapOptions>,
    /// Reuse a previously written `vqe.json` instead of optimising again.
    #[serde(default)]
    pub vqe_input: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_pool() -> usize {
    10
}
fn default_fraction() -> f64 {
    1e-2
}
fn default_max_depth() -> usize {
    MAX_AUTO_DEPTH
}
fn default_q_values() -> Vec<f64> {
    DEFAULT_Q_MAX_VALUES.to_vec()
}
fn default_repetitions() -> usize {
    50
}
fn default_pools() -> Vec<usize> {
    DEFAULT_POOL_SIZES.to_vec()
}
fn default_topology() -> Topology {
    Topology::Ring
}
fn default_q_max() -> f64 {
    1e-3
}
fn default_permutations() -> PermutationSpec {
    PermutationSpec::All(AllTag::All)
}
fn default_energy_mode() -> EnergyMode {
    EnergyMode::ExactSim
}
fn default_bootstrap() -> Option<BootstrapOptions> {
    Some(BootstrapOptions::default())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("n must be at least 2");
        }
        if let (DepthSpec::Auto(_), HamiltonianSpec::Explicit { .. }) = (self.depth, &self.hamiltonian) {
            bail!("auto depth requires a Hamiltonian family (type a or b)");
        }
        if let HamiltonianSpec::Explicit { couplings, fields } = &self.hamiltonian {
            if couplings.len() != self.n || fields.len() != self.n {
                bail!("explicit Hamiltonian needs {} couplings and fields", self.n);
            }
            if !self.scaling.n_values.is_empty() && self.scaling.n_values.iter().any(|&m| m != self.n) {
                bail!("scaling over n requires a Hamiltonian family");
            }
        }
        if let DepthSpec::Fixed(0) = self.depth {
            bail!("depth must be positive");
        }
        if matches!(self.permutations, PermutationSpec::All(_)) {
            for &m in self.qubit_counts().iter() {
                if m > MAX_ENUMERATE {
                    bail!("permutations = all requires n <= {MAX_ENUMERATE}, got {m}");
                }
            }
        }
        if !(0.0..=1.0).contains(&self.q_max) {
            bail!("q_max must lie in [0, 1]");
        }
        if self.sweep.q_max_values.iter().any(|q| !(0.0..=1.0).contains(q)) {
            bail!("sweep q_max values must lie in [0, 1]");
        }
        if self.vqe.pool_size == 0 {
            bail!("VQE seed pool must be non-empty");
        }
        if self.vqe.max_depth == 0 || self.vqe.max_depth > MAX_AUTO_DEPTH {
            bail!("max_depth must lie in 1..={MAX_AUTO_DEPTH}");
        }
        if self.scaling.repetitions == 0 || self.scaling.pool_sizes.iter().any(|&p| p < 2) {
            bail!("scaling needs at least one repetition and pools of at least 2 permutations");
        }
        Ok(())
    }

    pub fn qubit_counts(&self) -> Vec<usize> {
        if self.scaling.n_values.is_empty() {
            vec![self.n]
        } else {
            self.scaling.n_values.clone()
        }
    }

    /// Same experiment on `n` qubits.
    pub fn with_n(&self, n: usize) -> Self {
        ExperimentConfig { n, ..self.clone() }
    }

    pub fn hamiltonian(&self) -> Result<PauliHamiltonian> {
        Ok(match &self.hamiltonian {
            HamiltonianSpec::Family { kind } => build_tfim_kind(self.n, (*kind).into())?,
            HamiltonianSpec::Explicit { couplings, fields } => build_tfim(self.n, couplings, fields)?,
        })
    }

    pub fn vqe_seeds(&self) -> Vec<u64> {
        permzne::vqe::seed_pool(self.vqe.seed, self.vqe.pool_size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"n": 6, "hamiltonian": {"type": "a"}, "depth": "auto"}"#).unwrap();
        c.validate().unwrap();
        assert_eq!(c.depth, DepthSpec::Auto(AutoTag::Auto));
        assert_eq!(c.permutations, PermutationSpec::All(AllTag::All));
        assert_eq!(c.scaling.pool_sizes, DEFAULT_POOL_SIZES);
        assert_eq!(c.vqe.pool_size, 10);
    }

    #[test]
    fn round_trips() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"n": 4, "topology": "line", "hamiltonian": {"couplings": [1,1,1,1], "fields": [0.5,0.5,0.5,0.5]},
                "depth": 2, "permutations": {"sample": {"count": 10, "seed": 3}}, "energy_mode": "first_order"}"#,
        )
        .unwrap();
        c.validate().unwrap();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invariants_enforced() {
        let parse = |s: &str| serde_json::from_str::<ExperimentConfig>(s).unwrap().validate();
        assert!(parse(r#"{"n": 4, "hamiltonian": {"couplings": [1,1,1,1], "fields": [1,1,1,1]}, "depth": "auto"}"#).is_err());
        assert!(parse(r#"{"n": 9, "hamiltonian": {"type": "a"}, "depth": 2}"#).is_err());
        assert!(parse(r#"{"n": 9, "hamiltonian": {"type": "a"}, "depth": 2, "permutations": {"sample": {"count": 5, "seed": 0}}}"#).is_ok());
        assert!(parse(r#"{"n": 4, "hamiltonian": {"type": "b"}, "depth": 0}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"n": 4, "hamiltonian": {"type": "b"}, "depth": 1, "bogus": 1}"#).is_err());
    }
}
