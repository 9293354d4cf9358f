//! Error-rate tables, abstract-to-physical qubit permutations and circuit
//! error sums.

use std::io::{Read, Write};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{arg, Error, Result};
use crate::qsim::ChannelKind;
use crate::rng;

/// Largest `n` for exhaustive enumeration (`8! = 40320`).
pub const MAX_ENUMERATE: usize = 8;
/// Largest `n` whose permutations can be ranked in a `u64`.
pub const MAX_RANKED: usize = 20;

/// Symmetric table of two-qubit error rates between physical qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    num_qubits: usize,
    /// Row-major `n x n`; the diagonal is unused and kept at zero.
    rates: Vec<f64>,
    pub channel: ChannelKind,
    /// Seed the table was drawn with, if it was sampled.
    pub seed: Option<u64>,
}

impl ErrorModel {
    /// Build from a full matrix, which must be symmetric with rates in [0, 1].
    pub fn from_matrix(rates: Vec<Vec<f64>>) -> Result<Self> {
        let n = rates.len();
        if n < 2 {
            return arg("error table needs at least two qubits");
        }
        let mut flat = vec![0.0; n * n];
        for (j, row) in rates.iter().enumerate() {
            if row.len() != n {
                return arg(format!("error table row {j} has {} entries, expected {n}", row.len()));
            }
            for (k, &v) in row.iter().enumerate() {
                if j != k {
                    flat[j * n + k] = v;
                }
            }
        }
        let model = ErrorModel { num_qubits: n, rates: flat, channel: ChannelKind::Depolarizing, seed: None };
        model.validate()?;
        Ok(model)
    }

    /// Every pair gets the same rate.
    pub fn uniform(n: usize, rate: f64) -> Result<Self> {
        Self::from_matrix(vec![vec![rate; n]; n])
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        for j in 0..n {
            for k in 0..n {
                let v = self.rates[j * n + k];
                if j != k && !(0.0..=1.0).contains(&v) {
                    return arg(format!("rate q[{j}][{k}] = {v} outside [0, 1]"));
                }
                if v != self.rates[k * n + j] {
                    return arg(format!("rate table not symmetric at ({j}, {k})"));
                }
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn rate(&self, j: usize, k: usize) -> f64 {
        self.rates[j * self.num_qubits + k]
    }

    /// Upper-triangle entries `(j, k, rate)` with `j < k`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.num_qubits;
        (0..n).flat_map(move |j| (j + 1..n).map(move |k| (j, k, self.rate(j, k))))
    }

    /// Mean rate over unordered pairs.
    pub fn mean_rate(&self) -> f64 {
        let n = self.num_qubits;
        self.pairs().map(|(_, _, r)| r).sum::<f64>() / (n * (n - 1) / 2) as f64
    }

    pub fn max_rate(&self) -> f64 {
        self.pairs().map(|(_, _, r)| r).fold(0.0, f64::max)
    }

    /// The same table with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.rates.iter_mut().for_each(|r| *r *= factor);
        out.validate()?;
        Ok(out)
    }

    /// Rate felt by the circuit pair `(j, k)` under `pi`.
    pub fn pulled_back(&self, pi: &Permutation, j: usize, k: usize) -> f64 {
        self.rate(pi.image[j], pi.image[k])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["row", "col", "rate"]).map_err(csv_err)?;
        for (j, k, r) in self.pairs() {
            w.write_record([j.to_string(), k.to_string(), format!("{r:e}")]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a `(row, col, rate)` table; unlisted pairs default to zero and
    /// each listed entry is mirrored.
    pub fn read_csv<R: Read>(reader: R, num_qubits: usize) -> Result<Self> {
        let mut table = vec![vec![0.0; num_qubits]; num_qubits];
        let mut r = csv::Reader::from_reader(reader);
        for rec in r.deserialize::<(usize, usize, f64)>() {
            let (j, k, v) = rec.map_err(csv_err)?;
            if j >= num_qubits || k >= num_qubits || j == k {
                return arg(format!("invalid table entry ({j}, {k})"));
            }
            table[j][k] = v;
            table[k][j] = v;
        }
        Self::from_matrix(table)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Argument(format!("csv: {e}"))
}

/// Draw the upper triangle i.i.d. from `U[0, q_max]` and mirror it.
pub fn sample_error_table(n: usize, q_max: f64, seed: u64) -> Result<ErrorModel> {
    if !(0.0..=1.0).contains(&q_max) {
        return arg(format!("q_max {q_max} outside [0, 1]"));
    }
    if n < 2 {
        return arg("error table needs at least two qubits");
    }
    let mut rng = rng::stream(seed, rng::STREAM_ERROR_TABLE);
    let mut table = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let v = q_max * rng.random::<f64>();
            table[j][k] = v;
            table[k][j] = v;
        }
    }
    let mut model = ErrorModel::from_matrix(table)?;
    model.seed = Some(seed);
    Ok(model)
}

/// Bijection from circuit qubits to physical qubits: `j -> image[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &v in &image {
            if v >= image.len() || std::mem::replace(&mut seen[v], true) {
                return arg(format!("{image:?} is not a permutation"));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, j: usize) -> usize {
        self.image[j]
    }

    /// Lehmer digits: `code[i]` counts later entries smaller than `image[i]`.
    pub fn lehmer_code(&self) -> Vec<usize> {
        (0..self.image.len())
            .map(|i| self.image[i + 1..].iter().filter(|&&v| v < self.image[i]).count())
            .collect()
    }

    /// Lexicographic rank, the mixed-radix value of the Lehmer code.
    pub fn rank(&self) -> Result<u64> {
        let n = self.image.len();
        if n > MAX_RANKED {
            return Err(Error::Capability(format!("cannot rank permutations of {n} > {MAX_RANKED}")));
        }
        Ok(self
            .lehmer_code()
            .iter()
            .enumerate()
            .map(|(i, &c)| c as u64 * factorial(n - 1 - i))
            .sum())
    }

    /// Inverse of [`Permutation::rank`].
    pub fn from_rank(n: usize, mut rank: u64) -> Result<Self> {
        if n > MAX_RANKED {
            return Err(Error::Capability(format!("cannot unrank permutations of {n} > {MAX_RANKED}")));
        }
        if rank >= factorial(n) {
            return arg(format!("rank {rank} out of range for n = {n}"));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let mut image = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let f = factorial(i);
            let digit = (rank / f) as usize;
            rank %= f;
            image.push(pool.remove(digit));
        }
        Ok(Permutation { image })
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All `n!` permutations in lexicographic order.
pub fn enumerate_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n > MAX_ENUMERATE {
        return Err(Error::Capability(format!("enumeration limited to n <= {MAX_ENUMERATE}, got {n}")));
    }
    (0..factorial(n)).map(|r| Permutation::from_rank(n, r)).collect()
}

/// `count` distinct permutations drawn uniformly without replacement.
pub fn sample_permutations(n: usize, count: usize, seed: u64) -> Result<Vec<Permutation>> {
    if count < 2 {
        return arg(format!("need at least two permutations, got {count}"));
    }
    if n > MAX_RANKED {
        return Err(Error::Capability(format!("sampling limited to n <= {MAX_RANKED}, got {n}")));
    }
    let total = factorial(n);
    if count as u64 > total {
        return arg(format!("cannot draw {count} distinct permutations of {n} elements"));
    }
    let mut rng = rng::stream(seed, rng::STREAM_PERMUTATIONS);
    index::sample(&mut rng, total as usize, count)
        .into_iter()
        .map(|r| Permutation::from_rank(n, r as u64))
        .collect()
}

/// `d * sum_{(j,k) in T} q[pi(j)][pi(k)]`.
pub fn circuit_error_sum(circuit: &Circuit, model: &ErrorModel, pi: &Permutation) -> Result<f64> {
    check_sizes(circuit, model, pi)?;
    Ok(circuit.depth() as f64 * pair_rate_sum(circuit, model, pi))
}

pub(crate) fn pair_rate_sum(circuit: &Circuit, model: &ErrorModel, pi: &Permutation) -> f64 {
    circuit.pairs().iter().map(|&(j, k)| model.pulled_back(pi, j, k)).sum()
}

pub(crate) fn check_sizes(circuit: &Circuit, model: &ErrorModel, pi: &Permutation) -> Result<()> {
    let n = circuit.num_qubits();
    if model.num_qubits() != n || pi.len() != n {
        return arg(format!(
            "size mismatch: circuit {n}, error table {}, permutation {}",
            model.num_qubits(),
            pi.len()
        ));
    }
    Ok(())
}
