use permzne::hamiltonian::build_tfim_kind;
use permzne::noise::{enumerate_permutations, sample_error_table, sample_permutations};
use permzne::qsim::{run_noisy_circuit, run_statevector, Complex64};
use permzne::vqe::{adjoint_gradient, energy};
use permzne::zne::{extrapolate, BootstrapOptions, EnergyMode};
use permzne::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_theta(c: &Circuit, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..c.num_params()).map(|_| rng.random_range(-3.0..3.0)).collect()
}

/// Gates (up to phase) implementing the Pauli `code` in {0: I, 1: X, 2: Y, 3: Z} on `q`.
fn pauli_gates(q: usize, code: usize) -> Vec<Gate> {
    use std::f64::consts::PI;
    match code {
        0 => vec![],
        1 => vec![Gate::rx(q, PI)],
        2 => vec![Gate::ry(q, PI)],
        _ => vec![Gate::rx(q, PI), Gate::ry(q, PI)],
    }
}

/// `rho = sum_S prod q^{|S|} (1-q)^{m-|S|} rho_S`, where `rho_S` replaces each
/// pair in `S` by `I/4` right after its gate, written as a uniform average over
/// the 16 two-qubit Pauli conjugations and propagated as pure states.
fn mixture_expansion(circuit: &Circuit, theta: &[f64], rates: &[f64]) -> Vec<Complex64> {
    let dim = 1usize << circuit.num_qubits();
    let gates: Vec<Gate> = circuit.gates(theta).collect();
    let two_q: Vec<usize> = (0..gates.len()).filter(|&i| gates[i].kind == GateKind::Rzz).collect();
    let m = two_q.len();
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for subset in 0..(1usize << m) {
        let weight: f64 = (0..m)
            .map(|g| if subset >> g & 1 == 1 { rates[g] } else { 1.0 - rates[g] })
            .product();
        if weight == 0.0 {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|g| subset >> g & 1 == 1).collect();
        let branches = 16usize.pow(chosen.len() as u32);
        for code in 0..branches {
            let mut psi = StateVector::zero(circuit.num_qubits()).unwrap();
            for (i, g) in gates.iter().enumerate() {
                psi.apply_gate(g).unwrap();
                if let Some(pos) = chosen.iter().position(|&c| two_q[c] == i) {
                    let digit = code / 16usize.pow(pos as u32) % 16;
                    for p in pauli_gates(g.targets[0], digit % 4).into_iter().chain(pauli_gates(g.targets[1], digit / 4)) {
                        psi.apply_gate(&p).unwrap();
                    }
                }
            }
            let amps = psi.amplitudes();
            let w = weight / branches as f64;
            for r in 0..dim {
                for c in 0..dim {
                    rho[r * dim + c] += amps[r] * amps[c].conj() * w;
                }
            }
        }
    }
    rho
}

#[test]
fn mixture_expansion_matches_density_engine() {
    let cases = [
        Circuit::layered(2, 2, vec![(0, 1)]).unwrap(),
        build_hea(3, 1, Topology::Ring).unwrap(),
        build_hea(3, 2, Topology::Line).unwrap(),
    ];
    for (i, circuit) in cases.iter().enumerate() {
        assert!(circuit.num_two_qubit_gates() <= 4);
        let theta = random_theta(circuit, i as u64);
        let n = circuit.num_qubits();
        for seed in 0..3 {
            let model = sample_error_table(n, 0.4, seed).unwrap();
            let pi = sample_permutations(n, 2, seed).unwrap().remove(1);
            let rates: Vec<f64> = circuit
                .slots()
                .iter()
                .filter_map(|s| s.pair)
                .map(|p| {
                    let (j, k) = circuit.pairs()[p];
                    model.pulled_back(&pi, j, k)
                })
                .collect();
            let rho = run_noisy_circuit(circuit, &theta, &model, &pi).unwrap();
            let oracle = mixture_expansion(circuit, &theta, &rates);
            let diff = rho.entries().iter().zip(&oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff <= 1e-12, "case {i} seed {seed}: {diff:e}");
        }
    }
}

#[test]
fn noisy_states_are_physical() {
    for n in 2..=6 {
        let circuit = build_hea(n, 2, Topology::Ring).unwrap();
        let theta = random_theta(&circuit, n as u64);
        for q_max in [1e-3, 0.3, 1.0] {
            let model = sample_error_table(n, q_max, 7).unwrap();
            let rho = run_noisy_circuit(&circuit, &theta, &model, &Permutation::identity(n)).unwrap();
            let report = rho.cptp_report();
            assert!(report.is_valid(), "n={n} q_max={q_max}: {report:?}");
        }
    }
}

#[test]
fn zero_noise_reduces_to_statevector() {
    let circuit = build_hea(4, 3, Topology::Line).unwrap();
    let theta = random_theta(&circuit, 3);
    let model = ErrorModel::uniform(4, 0.0).unwrap();
    let rho = run_noisy_circuit(&circuit, &theta, &model, &Permutation::identity(4)).unwrap();
    let pure = DensityMatrix::from_pure(&run_statevector(&circuit, &theta).unwrap()).unwrap();
    assert!(rho.max_abs_diff(&pure) <= 1e-13);
}

#[test]
fn gradient_matches_central_differences() {
    let h = build_tfim_kind(4, TfimKind::B).unwrap();
    for topology in [Topology::Ring, Topology::Line] {
        let circuit = build_hea(4, 2, topology).unwrap();
        let theta = random_theta(&circuit, 11);
        let (_, grad) = adjoint_gradient(&circuit, &h, &theta).unwrap();
        let step = 1e-5;
        for k in 0..theta.len() {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[k] += step;
            minus[k] -= step;
            let fd = (energy(&circuit, &h, &plus).unwrap() - energy(&circuit, &h, &minus).unwrap()) / (2.0 * step);
            assert!((fd - grad[k]).abs() <= 1e-6, "param {k}: {fd} vs {}", grad[k]);
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let n = 5;
    let circuit = build_hea(n, 2, Topology::Ring).unwrap();
    let h = build_tfim_kind(n, TfimKind::A).unwrap();
    let theta = random_theta(&circuit, 5);
    let run = || {
        let model = sample_error_table(n, 1e-3, 42).unwrap();
        let perms = sample_permutations(n, 30, 42).unwrap();
        let mut res = extrapolate(&circuit, &theta, &h, &model, &perms, EnergyMode::ExactSim, None).unwrap();
        res.attach_bootstrap(&BootstrapOptions { seed: 42, ..Default::default() }).unwrap();
        res.attach_moments(&circuit, &model, None).unwrap();
        serde_json::to_vec(&res).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn all_permutation_first_order_extrapolation_is_exact() {
    for n in 4..=6 {
        let circuit = build_hea(n, 2, Topology::Ring).unwrap();
        let h = build_tfim_kind(n, TfimKind::B).unwrap();
        let theta = random_theta(&circuit, 100 + n as u64);
        let perms = enumerate_permutations(n).unwrap();
        let model = sample_error_table(n, 1e-2, n as u64).unwrap();
        let res = extrapolate(&circuit, &theta, &h, &model, &perms, EnergyMode::FirstOrder, None).unwrap();
        assert!(res.error() <= 1e-10 * res.e0.abs().max(1.0), "n={n}: {:e}", res.error());
    }
}
