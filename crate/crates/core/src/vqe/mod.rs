//! Noiseless variational optimisation.
//!
//! Parameters start from `N(0, init_sigma^2)` and are refined by L-BFGS on the
//! exact statevector energy. Gradients come from reverse-mode (adjoint)
//! differentiation; the parameter-shift rule is kept as an independent route.

pub mod lbfgs;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_hea, Circuit, Topology};
use crate::error::{arg, Result};
use crate::hamiltonian::{gap_of, PauliHamiltonian};
use crate::qsim::{run_statevector, StateVector};
use crate::rng;
use lbfgs::{minimize, LbfgsOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VqeOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub f_tol: f64,
    pub memory: usize,
    pub init_sigma: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        VqeOptions { max_iters: 5000, grad_tol: 1e-9, f_tol: 0.0, memory: 10, init_sigma: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeOutcome {
    pub theta_star: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub grad_inf_norm: f64,
    pub seed: u64,
    pub trace_len: usize,
}

fn check_sizes(circuit: &Circuit, h: &PauliHamiltonian) -> Result<()> {
    if circuit.num_qubits() != h.num_qubits() {
        return arg(format!(
            "circuit on {} qubits, Hamiltonian on {}",
            circuit.num_qubits(),
            h.num_qubits()
        ));
    }
    Ok(())
}

pub fn energy(circuit: &Circuit, h: &PauliHamiltonian, theta: &[f64]) -> Result<f64> {
    check_sizes(circuit, h)?;
    run_statevector(circuit, theta)?.expectation(h)
}

/// Energy and its gradient by one forward and one backward sweep.
pub fn adjoint_gradient(circuit: &Circuit, h: &PauliHamiltonian, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_sizes(circuit, h)?;
    let mut phi = run_statevector(circuit, theta)?;
    let e = phi.expectation(h)?;
    let mut lambda = StateVector::from_amplitudes(h.apply(phi.amplitudes()))?;
    let mut grad = vec![0.0; circuit.num_params()];
    for slot in circuit.slots().iter().rev() {
        let gate = slot.gate(theta);
        // dE/dt = 2 Re <lambda| (-i/2) G |phi> = Im <lambda|G|phi>
        let mut g_phi = phi.clone();
        g_phi.apply_generator(&gate);
        grad[slot.param] += lambda.inner(&g_phi).im;
        phi.apply_gate_inverse(&gate)?;
        lambda.apply_gate_inverse(&gate)?;
    }
    Ok((e, grad))
}

/// Gradient by the two-point shift rule: every generator has eigenvalues
/// `±1`, so `dE/dt = (E(t + π/2) - E(t - π/2)) / 2` exactly.
pub fn energy_gradient(circuit: &Circuit, h: &PauliHamiltonian, theta: &[f64]) -> Result<Vec<f64>> {
    check_sizes(circuit, h)?;
    circuit.check_params(theta)?;
    let shift = std::f64::consts::FRAC_PI_2;
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut t = theta.to_vec();
            t[i] += shift;
            let plus = energy(circuit, h, &t)?;
            t[i] -= 2.0 * shift;
            let minus = energy(circuit, h, &t)?;
            Ok(0.5 * (plus - minus))
        })
        .collect()
}

pub fn initial_parameters(circuit: &Circuit, seed: u64, sigma: f64) -> Vec<f64> {
    let mut rng = rng::stream(seed, rng::STREAM_VQE_INIT);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    (0..circuit.num_params()).map(|_| normal.sample(&mut rng)).collect()
}

/// Single-start minimisation of the exact energy.
pub fn optimize(circuit: &Circuit, h: &PauliHamiltonian, init_seed: u64, opts: &VqeOptions) -> Result<VqeOutcome> {
    check_sizes(circuit, h)?;
    if !(opts.init_sigma >= 0.0 && opts.init_sigma.is_finite()) {
        return arg(format!("invalid init_sigma {}", opts.init_sigma));
    }
    let x0 = initial_parameters(circuit, init_seed, opts.init_sigma);
    let lopts = LbfgsOptions {
        memory: opts.memory,
        max_iters: opts.max_iters,
        grad_tol: opts.grad_tol,
        f_tol: opts.f_tol,
        ..Default::default()
    };
    let report = minimize(
        |x, g| {
            let (e, grad) = adjoint_gradient(circuit, h, x).expect("sizes checked");
            g.copy_from_slice(&grad);
            e
        },
        &x0,
        &lopts,
    );
    if report.grad_inf_norm > opts.grad_tol {
        log::debug!("seed {init_seed}: stopped with {:?} at |g|={:e}", report.termination, report.grad_inf_norm);
    }
    Ok(VqeOutcome {
        converged: report.grad_inf_norm <= opts.grad_tol,
        energy: report.f,
        iterations: report.iterations,
        evaluations: report.evaluations,
        grad_inf_norm: report.grad_inf_norm,
        seed: init_seed,
        trace_len: report.trace.len(),
        theta_star: report.x,
    })
}

/// Run every seed and keep the lowest energy; ties go to the earlier seed.
pub fn optimize_multistart(
    circuit: &Circuit,
    h: &PauliHamiltonian,
    seeds: &[u64],
    opts: &VqeOptions,
) -> Result<VqeOutcome> {
    if seeds.is_empty() {
        return arg("empty seed pool");
    }
    let runs = seeds
        .par_iter()
        .map(|&s| optimize(circuit, h, s, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.energy < best.energy { r } else { best })
        .expect("non-empty"))
}

/// Seeds `base, base+1, ...` of a pool.
pub fn seed_pool(base: u64, size: usize) -> Vec<u64> {
    (0..size as u64).map(|i| base + i).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthScanRow {
    pub depth: usize,
    pub best: VqeOutcome,
    /// `E* - E_ground`.
    pub error: f64,
    /// `error / gap`.
    pub relative_error: f64,
}

/// Best energy per depth over a fixed seed pool.
pub fn depth_scan(
    n: usize,
    topology: Topology,
    h: &PauliHamiltonian,
    depths: &[usize],
    seeds: &[u64],
    opts: &VqeOptions,
) -> Result<Vec<DepthScanRow>> {
    let spectrum = h.exact_spectrum()?;
    let ground = spectrum[0];
    let gap = gap_of(&spectrum).unwrap_or(f64::NAN);
    let mut rows: Vec<DepthScanRow> = Vec::with_capacity(depths.len());
    for &depth in depths {
        let circuit = build_hea(n, depth, topology)?;
        let best = optimize_multistart(&circuit, h, seeds, opts)?;
        let error = best.energy - ground;
        if let Some(prev) = rows.last() {
            if prev.depth < depth && best.energy > prev.best.energy + 1e-9 {
                log::warn!("depth {depth} best energy {} above depth {} ({})", best.energy, prev.depth, prev.best.energy);
            }
        }
        rows.push(DepthScanRow { depth, error, relative_error: error / gap, best });
    }
    Ok(rows)
}

/// Increase the depth from 1 until `E* - E_ground <= fraction * gap`.
/// Returns the whole scan; the last row is the accepted depth when the
/// target was met.
pub fn auto_depth(
    n: usize,
    topology: Topology,
    h: &PauliHamiltonian,
    max_depth: usize,
    fraction: f64,
    seeds: &[u64],
    opts: &VqeOptions,
) -> Result<(Vec<DepthScanRow>, Option<usize>)> {
    let mut rows = Vec::new();
    for depth in 1..=max_depth {
        let row = depth_scan(n, topology, h, &[depth], seeds, opts)?.remove(0);
        let hit = row.relative_error <= fraction;
        log::info!("depth {depth}: E*={:.10} relative error {:.3e}", row.best.energy, row.relative_error);
        rows.push(row);
        if hit {
            return Ok((rows, Some(depth)));
        }
    }
    Ok((rows, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_tfim, build_tfim_kind, TfimKind};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn random_theta(c: &Circuit, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..c.num_params()).map(|_| rng.random_range(-3.0..3.0)).collect()
    }

    fn finite_difference(c: &Circuit, h: &PauliHamiltonian, theta: &[f64], step: f64) -> Vec<f64> {
        (0..theta.len())
            .map(|i| {
                let mut t = theta.to_vec();
                t[i] += step;
                let plus = energy(c, h, &t).unwrap();
                t[i] -= 2.0 * step;
                let minus = energy(c, h, &t).unwrap();
                (plus - minus) / (2.0 * step)
            })
            .collect()
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (n, topo, seed) in [(3, Topology::Ring, 1), (4, Topology::Line, 2), (4, Topology::Ring, 3)] {
            let c = build_hea(n, 2, topo).unwrap();
            let h = build_tfim(n, &vec![0.7; n], &vec![1.3; n]).unwrap();
            let theta = random_theta(&c, seed);
            let fd = finite_difference(&c, &h, &theta, 1e-5);
            let shift = energy_gradient(&c, &h, &theta).unwrap();
            let (_, adj) = adjoint_gradient(&c, &h, &theta).unwrap();
            for i in 0..theta.len() {
                assert!((shift[i] - fd[i]).abs() <= 1e-6, "shift {i}: {} vs {}", shift[i], fd[i]);
                assert!((adj[i] - fd[i]).abs() <= 1e-6, "adjoint {i}: {} vs {}", adj[i], fd[i]);
                assert_abs_diff_eq!(adj[i], shift[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gradients_with_y_terms() {
        let c = build_hea(3, 1, Topology::Ring).unwrap();
        let h = PauliHamiltonian::from_labels(&[(0.5, "YXI"), (-0.8, "ZYY"), (1.1, "IIY")]).unwrap();
        let theta = random_theta(&c, 9);
        let (_, adj) = adjoint_gradient(&c, &h, &theta).unwrap();
        let shift = energy_gradient(&c, &h, &theta).unwrap();
        for (a, s) in adj.iter().zip(&shift) {
            assert_abs_diff_eq!(a, s, epsilon = 1e-12);
        }
    }

    #[test]
    fn decoupled_parameter_has_zero_gradient() {
        // Z on qubit 0 is unaffected by an RZZ on (1, 2) when nothing mixes
        // qubit 0 with the others afterwards: with a single line layer the
        // (1, 2) coupling commutes with Z_0.
        let c = build_hea(3, 1, Topology::Line).unwrap();
        let h = PauliHamiltonian::from_labels(&[(1.0, "ZII")]).unwrap();
        let theta = random_theta(&c, 4);
        let grad = energy_gradient(&c, &h, &theta).unwrap();
        let slot = c.slots().iter().find(|s| s.pair == Some(1)).unwrap();
        assert_abs_diff_eq!(grad[slot.param], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn single_qubit_ground_state() {
        let c = Circuit::layered(1, 1, vec![]).unwrap();
        let h = PauliHamiltonian::from_labels(&[(1.0, "Z")]).unwrap();
        let out = optimize(&c, &h, 0, &VqeOptions::default()).unwrap();
        assert_abs_diff_eq!(out.energy, -1.0, epsilon = 1e-8);
    }

    #[test]
    fn converged_optimum_is_stationary() {
        let c = build_hea(3, 2, Topology::Ring).unwrap();
        let h = build_tfim_kind(3, TfimKind::A).unwrap();
        let opts = VqeOptions::default();
        let out = optimize(&c, &h, 5, &opts).unwrap();
        let ground = h.ground_energy().unwrap();
        assert!(out.energy >= ground - 1e-9);
        if out.converged {
            let (_, g) = adjoint_gradient(&c, &h, &out.theta_star).unwrap();
            assert!(g.iter().all(|v| v.abs() <= opts.grad_tol));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let c = build_hea(3, 1, Topology::Ring).unwrap();
        let h = build_tfim_kind(3, TfimKind::B).unwrap();
        let a = optimize(&c, &h, 7, &VqeOptions::default()).unwrap();
        let b = optimize(&c, &h, 7, &VqeOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn size_mismatch() {
        let c = build_hea(3, 1, Topology::Ring).unwrap();
        let h = build_tfim_kind(4, TfimKind::A).unwrap();
        assert!(optimize(&c, &h, 0, &VqeOptions::default()).is_err());
    }
}
