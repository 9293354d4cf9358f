use num_complex::Complex64;

use super::gate::{Gate, GateKind};
use super::kernels::{apply_1q, apply_parity_phase, pauli_phase};
use crate::error::{arg, Error, Result};
use crate::hamiltonian::PauliHamiltonian;

pub const MAX_STATEVECTOR_QUBITS: usize = 20;

/// Pure state on `n` qubits; qubit 0 is the least significant index bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return arg("state needs at least one qubit");
        }
        if num_qubits > MAX_STATEVECTOR_QUBITS {
            return Err(Error::Capability(format!(
                "statevector limited to {MAX_STATEVECTOR_QUBITS} qubits, got {num_qubits}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Wrap raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return arg(format!("amplitude count {len} is not a power of two >= 2"));
        }
        Ok(StateVector { num_qubits: len.trailing_zeros() as usize, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        apply_gate_raw(&mut self.amps, gate, false);
        Ok(())
    }

    /// Apply the inverse of `gate`.
    pub fn apply_gate_inverse(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        apply_gate_raw(&mut self.amps, gate, true);
        Ok(())
    }

    /// Multiply by the gate's generator (`Y`, `X` or `Z⊗Z`).
    pub(crate) fn apply_generator(&mut self, gate: &Gate) {
        let amps = &mut self.amps;
        match gate.kind {
            GateKind::Ry => {
                let bit = 1 << gate.targets[0];
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (amps[i], amps[i | bit]);
                        // Y = [[0, -i], [i, 0]]
                        amps[i] = Complex64::new(a1.im, -a1.re);
                        amps[i | bit] = Complex64::new(-a0.im, a0.re);
                    }
                }
            }
            GateKind::Rx => {
                let bit = 1 << gate.targets[0];
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            GateKind::Rzz => {
                let one = Complex64::new(1.0, 0.0);
                apply_parity_phase(amps, gate.targets[0], gate.targets[1], one, -one);
            }
        }
    }

    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.num_qubits() != self.num_qubits {
            return arg(format!(
                "Hamiltonian on {} qubits, state on {}",
                h.num_qubits(),
                self.num_qubits
            ));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for t in h.compiled() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, a) in self.amps.iter().enumerate() {
                acc += self.amps[i ^ t.x_mask].conj() * pauli_phase(i, t.z_mask, t.y_phase) * a;
            }
            total += acc * t.coeff;
        }
        debug_assert!(total.im.abs() <= 1e-10 * (1.0 + total.re.abs()), "imaginary energy {total}");
        Ok(total.re)
    }
}

pub(crate) fn apply_gate_raw(amps: &mut [Complex64], gate: &Gate, inverse: bool) {
    let g = if inverse { Gate { angle: -gate.angle, ..*gate } } else { *gate };
    match g.kind {
        GateKind::Ry | GateKind::Rx => apply_1q(amps, g.targets[0], &g.matrix_1q()),
        GateKind::Rzz => {
            let (same, diff) = g.zz_phases();
            apply_parity_phase(amps, g.targets[0], g.targets[1], same, diff);
        }
    }
}
