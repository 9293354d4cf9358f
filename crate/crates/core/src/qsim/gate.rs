use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Ry,
    Rx,
    Rzz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Ry | GateKind::Rx => 1,
            GateKind::Rzz => 2,
        }
    }
}

/// A parameterised rotation. For single-qubit kinds only `targets[0]` is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub angle: f64,
    pub targets: [usize; 2],
}

impl Gate {
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Ry, angle, targets: [qubit, qubit] }
    }

    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Rx, angle, targets: [qubit, qubit] }
    }

    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Rzz, angle, targets: [a, b] }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.targets[..self.kind.arity()]
    }

    pub(crate) fn validate(&self, num_qubits: usize) -> Result<()> {
        if !self.angle.is_finite() {
            return arg(format!("gate angle {} is not finite", self.angle));
        }
        for &q in self.qubits() {
            if q >= num_qubits {
                return arg(format!("qubit index {q} out of range for {num_qubits} qubits"));
            }
        }
        if self.kind == GateKind::Rzz && self.targets[0] == self.targets[1] {
            return arg(format!("two-qubit gate on repeated qubit {}", self.targets[0]));
        }
        Ok(())
    }

    /// 2x2 matrix of a single-qubit gate, row-major.
    pub(crate) fn matrix_1q(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = (self.angle / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        match self.kind {
            GateKind::Ry => [
                [c, Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), c],
            ],
            GateKind::Rx => [
                [c, Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), c],
            ],
            GateKind::Rzz => unreachable!("RZZ is diagonal"),
        }
    }

    /// Diagonal phases of RZZ for equal and differing bit values.
    pub(crate) fn zz_phases(&self) -> (Complex64, Complex64) {
        let half = self.angle / 2.0;
        (Complex64::from_polar(1.0, -half), Complex64::from_polar(1.0, half))
    }

    /// Full unitary on the gate's own qubits (2x2 or 4x4, first target is the
    /// low bit).
    pub fn unitary(&self) -> Vec<Vec<Complex64>> {
        match self.kind {
            GateKind::Ry | GateKind::Rx => self.matrix_1q().iter().map(|r| r.to_vec()).collect(),
            GateKind::Rzz => {
                let (same, diff) = self.zz_phases();
                let zero = Complex64::new(0.0, 0.0);
                (0..4)
                    .map(|i| {
                        (0..4)
                            .map(|j| {
                                if i != j {
                                    zero
                                } else if (i & 1) == (i >> 1) {
                                    same
                                } else {
                                    diff
                                }
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}
