//! Pauli-sum Hamiltonians, the periodic transverse-field Ising family and
//! dense exact diagonalisation.
//!
//! Pauli labels are written with qubit 0 first: `"ZXI"` is `Z` on qubit 0,
//! `X` on qubit 1 and identity on qubit 2.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::qsim::kernels::{pauli_phase, y_phase};

/// Largest system handled by dense diagonalisation (4096 x 4096).
pub const MAX_SPECTRUM_QUBITS: usize = 12;

/// Eigenvalues closer than this are one level when computing the gap.
pub const LEVEL_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        PauliString { ops }
    }

    pub fn identity(n: usize) -> Self {
        PauliString { ops: vec![Pauli::I; n] }
    }

    /// Identity everywhere except the listed `(qubit, op)` factors.
    pub fn sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            if q >= n {
                return arg(format!("qubit {q} out of range for {n}-qubit Pauli string"));
            }
            s.ops[q] = p;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// Bit masks `(x, z)` and the Y count such that
    /// `P|i> = i^{#Y} (-1)^{popcount(i & z)} |i ^ x>`.
    pub fn masks(&self) -> (usize, usize, usize) {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0usize);
        for (q, p) in self.ops.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x |= 1 << q,
                Pauli::Z => z |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }

    /// Whether acts only on qubits outside `qubits`.
    pub fn is_trivial_on(&self, qubits: &[usize]) -> bool {
        qubits.iter().all(|&q| self.ops.get(q).is_none_or(|p| *p == Pauli::I))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ops.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::Argument(format!("invalid Pauli label {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString::new)
    }
}

/// Precomputed action of one weighted Pauli term on basis states.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CompiledTerm {
    pub coeff: f64,
    pub x_mask: usize,
    pub z_mask: usize,
    pub y_phase: Complex64,
}

/// A real-weighted sum of Pauli strings, Hermitian by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HamiltonianDoc", into = "HamiltonianDoc")]
pub struct PauliHamiltonian {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if num_qubits == 0 {
            return arg("Hamiltonian needs at least one qubit");
        }
        for (c, p) in &terms {
            if p.len() != num_qubits {
                return arg(format!("Pauli string {p} has length {}, expected {num_qubits}", p.len()));
            }
            if !c.is_finite() {
                return arg(format!("non-finite coefficient {c} on {p}"));
            }
        }
        Ok(PauliHamiltonian { num_qubits, terms })
    }

    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, l)| l.chars().count())
            .ok_or_else(|| Error::Argument("no terms given".into()))?;
        let parsed = terms
            .iter()
            .map(|(c, l)| Ok((*c, l.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub(crate) fn compiled(&self) -> Vec<CompiledTerm> {
        self.terms
            .iter()
            .map(|(c, p)| {
                let (x_mask, z_mask, ny) = p.masks();
                CompiledTerm { coeff: *c, x_mask, z_mask, y_phase: y_phase(ny) }
            })
            .collect()
    }

    /// True when the matrix is real in the computational basis.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.masks().2 % 2 == 0)
    }

    /// `H|psi>` for a raw amplitude buffer of matching dimension.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for t in self.compiled() {
            for (i, a) in amps.iter().enumerate() {
                let phase = pauli_phase(i, t.z_mask, t.y_phase);
                out[i ^ t.x_mask] += phase * a * t.coeff;
            }
        }
        out
    }

    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.check_dense()?;
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for t in self.compiled() {
            for i in 0..dim {
                m[(i ^ t.x_mask, i)] += pauli_phase(i, t.z_mask, t.y_phase) * t.coeff;
            }
        }
        Ok(m)
    }

    fn check_dense(&self) -> Result<()> {
        if self.num_qubits > MAX_SPECTRUM_QUBITS {
            return Err(Error::Capability(format!(
                "dense diagonalisation limited to {MAX_SPECTRUM_QUBITS} qubits, got {}",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// All eigenvalues in ascending order.
    pub fn exact_spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.0)
    }

    /// Ascending eigenvalues with the matching normalised eigenvectors.
    pub fn eigen(&self) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
        let m = self.dense_matrix()?;
        let dim = m.nrows();
        let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if self.is_real() {
            let real = m.map(|z| z.re);
            let eig = SymmetricEigen::new(real);
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let eig = SymmetricEigen::new(m);
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted = order.iter().map(|&i| values[i]).collect();
        let vecs = order.iter().map(|&i| vectors.column(i).iter().copied().collect()).collect();
        Ok((sorted, vecs))
    }

    pub fn ground_energy(&self) -> Result<f64> {
        Ok(self.exact_spectrum()?[0])
    }

    /// Distance between the two lowest distinct levels, or `None` when the
    /// spectrum has a single level.
    pub fn spectral_gap(&self) -> Result<Option<f64>> {
        Ok(gap_of(&self.exact_spectrum()?))
    }
}

pub fn gap_of(sorted: &[f64]) -> Option<f64> {
    let ground = *sorted.first()?;
    sorted
        .iter()
        .find(|&&e| e - ground > LEVEL_MERGE_TOL)
        .map(|&e| e - ground)
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    coefficient: f64,
    pauli: String,
}

#[derive(Serialize, Deserialize)]
struct HamiltonianDoc {
    num_qubits: usize,
    terms: Vec<TermDoc>,
}

impl From<PauliHamiltonian> for HamiltonianDoc {
    fn from(h: PauliHamiltonian) -> Self {
        HamiltonianDoc {
            num_qubits: h.num_qubits,
            terms: h
                .terms
                .into_iter()
                .map(|(c, p)| TermDoc { coefficient: c, pauli: p.to_string() })
                .collect(),
        }
    }
}

impl TryFrom<HamiltonianDoc> for PauliHamiltonian {
    type Error = Error;

    fn try_from(doc: HamiltonianDoc) -> Result<Self> {
        let terms = doc
            .terms
            .into_iter()
            .map(|t| Ok((t.coefficient, t.pauli.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        PauliHamiltonian::new(doc.num_qubits, terms)
    }
}

/// The two coupling patterns used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfimKind {
    /// Uniform couplings and fields, all equal to one.
    A,
    /// First bond strengthened to 6, everything else one.
    B,
}

impl TfimKind {
    pub fn couplings(self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut j = vec![1.0; n];
        if self == TfimKind::B && n > 0 {
            j[0] = 6.0;
        }
        (j, vec![1.0; n])
    }
}

/// Periodic transverse-field Ising chain
/// `sum_j J_j Z_j Z_{j+1} + sum_j h_j X_j` with site `n` wrapping to site 0.
/// Terms are ordered bonds first, then fields.
pub fn build_tfim(n: usize, couplings: &[f64], fields: &[f64]) -> Result<PauliHamiltonian> {
    if n < 2 {
        return arg(format!("TFIM needs n >= 2, got {n}"));
    }
    if couplings.len() != n || fields.len() != n {
        return arg(format!(
            "expected {n} couplings and fields, got {} and {}",
            couplings.len(),
            fields.len()
        ));
    }
    let mut terms = Vec::with_capacity(2 * n);
    for (j, &c) in couplings.iter().enumerate() {
        terms.push((c, PauliString::sparse(n, &[(j, Pauli::Z), ((j + 1) % n, Pauli::Z)])?));
    }
    for (j, &h) in fields.iter().enumerate() {
        terms.push((h, PauliString::sparse(n, &[(j, Pauli::X)])?));
    }
    PauliHamiltonian::new(n, terms)
}

pub fn build_tfim_kind(n: usize, kind: TfimKind) -> Result<PauliHamiltonian> {
    let (j, h) = kind.couplings(n);
    build_tfim(n, &j, &h)
}
