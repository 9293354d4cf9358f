use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::gate::{Gate, GateKind};
use super::kernels::{apply_1q, apply_parity_phase, pauli_phase};
use super::statevector::StateVector;
use crate::error::{arg, Error, Result};
use crate::hamiltonian::PauliHamiltonian;

/// Refuse dense density matrices above this size (16M complex entries).
pub const MAX_DENSITY_QUBITS: usize = 12;

/// Qubit count up to which [`DensityMatrix::cptp_report`] diagonalises.
pub const EIGEN_CHECK_QUBITS: usize = 6;

/// Mixed state on `n` qubits, stored row-major as a `2^n x 2^n` array.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: Vec<Complex64>,
}

/// Deviations from a valid quantum state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    /// Only computed for `n <= EIGEN_CHECK_QUBITS`.
    pub min_eigenvalue: Option<f64>,
}

impl CptpReport {
    pub fn is_valid(&self) -> bool {
        self.trace_deviation <= 1e-10
            && self.hermiticity_deviation <= 1e-10
            && self.min_eigenvalue.is_none_or(|m| m >= -1e-9)
    }
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return arg("density matrix needs at least one qubit");
    }
    if num_qubits > MAX_DENSITY_QUBITS {
        return Err(Error::Capability(format!(
            "density matrix limited to {MAX_DENSITY_QUBITS} qubits, got {num_qubits}"
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        entries[0] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { num_qubits, entries })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { num_qubits, entries })
    }

    pub fn from_pure(state: &StateVector) -> Result<Self> {
        check_size(state.num_qubits())?;
        let a = state.amplitudes();
        let dim = a.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(a[r] * a[c].conj());
            }
        }
        Ok(DensityMatrix { num_qubits: state.num_qubits(), entries })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.entries[i * dim + i]).sum()
    }

    /// `rho -> U rho U^dagger`.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let n = self.num_qubits;
        match gate.kind {
            GateKind::Ry | GateKind::Rx => {
                let m = gate.matrix_1q();
                let conj = [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]];
                let q = gate.targets[0];
                apply_1q(&mut self.entries, q + n, &m);
                apply_1q(&mut self.entries, q, &conj);
            }
            GateKind::Rzz => {
                let (same, diff) = gate.zz_phases();
                let [a, b] = gate.targets;
                apply_parity_phase(&mut self.entries, a + n, b + n, same, diff);
                apply_parity_phase(&mut self.entries, a, b, same.conj(), diff.conj());
            }
        }
        Ok(())
    }

    /// Two-qubit depolarizing channel
    /// `rho -> (1 - q) rho + q Tr_{jk}(rho) ⊗ I/4`.
    pub fn apply_depolarizing(&mut self, pair: (usize, usize), q: f64) -> Result<()> {
        let (j, k) = pair;
        let n = self.num_qubits;
        if !(0.0..=1.0).contains(&q) {
            return arg(format!("error rate {q} outside [0, 1]"));
        }
        if j == k || j >= n || k >= n {
            return arg(format!("invalid qubit pair ({j}, {k}) for {n} qubits"));
        }
        if q == 0.0 {
            return Ok(());
        }
        // Offsets of the four pair configurations on the row and column side.
        let col_off = [0, 1 << j, 1 << k, (1 << j) | (1 << k)];
        let row_off = col_off.map(|o| o << n);
        let pair_bits = (col_off[3]) | (row_off[3]);
        let keep = 1.0 - q;
        let mix = q / 4.0;
        for base in 0..self.entries.len() {
            if base & pair_bits != 0 {
                continue;
            }
            let mut partial = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                partial += self.entries[base | row_off[a] | col_off[a]];
            }
            for a in 0..4 {
                for b in 0..4 {
                    let idx = base | row_off[a] | col_off[b];
                    let mut v = self.entries[idx] * keep;
                    if a == b {
                        v += partial * mix;
                    }
                    self.entries[idx] = v;
                }
            }
        }
        Ok(())
    }

    /// `Re Tr(rho H)`.
    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.num_qubits() != self.num_qubits {
            return arg(format!(
                "Hamiltonian on {} qubits, state on {}",
                h.num_qubits(),
                self.num_qubits
            ));
        }
        let dim = self.dim();
        let mut total = Complex64::new(0.0, 0.0);
        for t in h.compiled() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                acc += pauli_phase(i, t.z_mask, t.y_phase) * self.entries[i * dim + (i ^ t.x_mask)];
            }
            total += acc * t.coeff;
        }
        debug_assert!(total.im.abs() <= 1e-10 * (1.0 + total.re.abs()), "imaginary energy {total}");
        Ok(total.re)
    }

    /// Elementwise maximum of `|rho - rho^dagger|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                let d = self.entries[r * dim + c] - self.entries[c * dim + r].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            // symmetrise so the Hermitian solver sees an exactly Hermitian input
            (self.entries[r * dim + c] + self.entries[c * dim + r].conj()) * 0.5
        });
        SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn cptp_report(&self) -> CptpReport {
        CptpReport {
            trace_deviation: (self.trace() - 1.0).norm(),
            hermiticity_deviation: self.hermiticity_deviation(),
            min_eigenvalue: (self.num_qubits <= EIGEN_CHECK_QUBITS).then(|| self.min_eigenvalue()),
        }
    }

    /// Largest elementwise distance to another state of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
