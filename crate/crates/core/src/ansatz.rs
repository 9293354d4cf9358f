//! Layered hardware-efficient ansätze.
//!
//! Every layer applies `RY` then `RX` to each qubit, followed by one `RZZ` per
//! pair of the interaction set `T`, in the order the pairs are listed. Each
//! gate slot owns an independent parameter. Within layer `l` the parameter
//! offset is `l * (2n + |T|)`; `RY` on qubit `q` takes `2q`, `RX` takes
//! `2q + 1` and the `p`-th pair takes `2n + p`.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::qsim::{Gate, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Ring,
    Line,
}

/// One parameterised gate of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub layer: usize,
    pub kind: GateKind,
    pub targets: [usize; 2],
    pub param: usize,
    /// Index into the pair list for two-qubit slots.
    pub pair: Option<usize>,
}

impl Slot {
    pub fn gate(&self, params: &[f64]) -> Gate {
        Gate { kind: self.kind, angle: params[self.param], targets: self.targets }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    depth: usize,
    pairs: Vec<(usize, usize)>,
    slots: Vec<Slot>,
}

impl Circuit {
    /// A circuit of `depth` identical layers over the given pair list.
    pub fn layered(num_qubits: usize, depth: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if num_qubits == 0 {
            return arg("circuit needs at least one qubit");
        }
        if depth == 0 {
            return arg("circuit depth must be at least 1");
        }
        for &(j, k) in &pairs {
            if j == k || j >= num_qubits || k >= num_qubits {
                return arg(format!("invalid pair ({j}, {k}) for {num_qubits} qubits"));
            }
        }
        let per_layer = 2 * num_qubits + pairs.len();
        let mut slots = Vec::with_capacity(depth * per_layer);
        for layer in 0..depth {
            let offset = layer * per_layer;
            for q in 0..num_qubits {
                slots.push(Slot { layer, kind: GateKind::Ry, targets: [q, q], param: offset + 2 * q, pair: None });
                slots.push(Slot { layer, kind: GateKind::Rx, targets: [q, q], param: offset + 2 * q + 1, pair: None });
            }
            for (p, &(j, k)) in pairs.iter().enumerate() {
                slots.push(Slot {
                    layer,
                    kind: GateKind::Rzz,
                    targets: [j, k],
                    param: offset + 2 * num_qubits + p,
                    pair: Some(p),
                });
            }
        }
        Ok(Circuit { num_qubits, depth, pairs, slots })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn num_params(&self) -> usize {
        self.depth * (2 * self.num_qubits + self.pairs.len())
    }

    pub fn num_two_qubit_gates(&self) -> usize {
        self.depth * self.pairs.len()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return arg(format!("expected {} parameters, got {}", self.num_params(), params.len()));
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return arg(format!("non-finite parameter {bad}"));
        }
        Ok(())
    }

    pub fn gates<'a>(&'a self, params: &'a [f64]) -> impl Iterator<Item = Gate> + 'a {
        self.slots.iter().map(move |s| s.gate(params))
    }

    pub fn to_document(&self) -> CircuitDocument {
        CircuitDocument {
            num_qubits: self.num_qubits,
            depth: self.depth,
            num_params: self.num_params(),
            pairs: self.pairs.clone(),
            gates: self
                .slots
                .iter()
                .map(|s| GateEntry {
                    layer: s.layer,
                    kind: s.kind,
                    targets: s.targets[..s.kind.arity()].to_vec(),
                    param: s.param,
                })
                .collect(),
        }
    }
}

/// JSON-facing description of a circuit's gate list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub num_qubits: usize,
    pub depth: usize,
    pub num_params: usize,
    pub pairs: Vec<(usize, usize)>,
    pub gates: Vec<GateEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateEntry {
    pub layer: usize,
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub param: usize,
}

impl TryFrom<CircuitDocument> for Circuit {
    type Error = crate::Error;

    fn try_from(doc: CircuitDocument) -> Result<Self> {
        let circuit = Circuit::layered(doc.num_qubits, doc.depth, doc.pairs.clone())?;
        if circuit.to_document() != doc {
            return arg("circuit document is not a layered ansatz");
        }
        Ok(circuit)
    }
}

pub fn topology_pairs(n: usize, topology: Topology) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect();
    // for n = 2 the wrap-around bond would repeat (0, 1)
    if topology == Topology::Ring && n > 2 {
        pairs.push((n - 1, 0));
    }
    pairs
}

/// Hardware-efficient ansatz on a ring or a line of `n` qubits.
pub fn build_hea(n: usize, depth: usize, topology: Topology) -> Result<Circuit> {
    if n < 2 {
        return arg(format!("hardware-efficient ansatz needs n >= 2, got {n}"));
    }
    Circuit::layered(n, depth, topology_pairs(n, topology))
}

/// Gate counts of the circuit's interaction multigraph, indexed like
/// [`Circuit::pairs`].
///
/// `n1` and `n0` follow `n1 = deg(j) + deg(k) - n2`, `n0 = |T| d - n1 - n2`
/// literally, so `n1` counts gates on the pair itself once. Only their
/// constancy across pairs matters for exact extrapolation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultigraphStats {
    pub degree: Vec<i64>,
    pub n2: Vec<i64>,
    pub n1: Vec<i64>,
    pub n0: Vec<i64>,
}

pub fn multigraph_stats(circuit: &Circuit) -> MultigraphStats {
    let mut degree = vec![0i64; circuit.num_qubits()];
    let same_pair = |a: (usize, usize), b: (usize, usize)| a == b || a == (b.1, b.0);
    for s in circuit.slots().iter().filter(|s| s.kind == GateKind::Rzz) {
        degree[s.targets[0]] += 1;
        degree[s.targets[1]] += 1;
    }
    let total = circuit.num_two_qubit_gates() as i64;
    let mut stats = MultigraphStats { degree, n2: vec![], n1: vec![], n0: vec![] };
    for &(j, k) in circuit.pairs() {
        let n2 = circuit
            .slots()
            .iter()
            .filter(|s| s.kind == GateKind::Rzz && same_pair((s.targets[0], s.targets[1]), (j, k)))
            .count() as i64;
        let n1 = stats.degree[j] + stats.degree[k] - n2;
        stats.n2.push(n2);
        stats.n1.push(n1);
        stats.n0.push(total - n1 - n2);
    }
    stats
}

/// Whether `(n2, n1, n0)` is the same for every pair.
pub fn has_uniform_counts(stats: &MultigraphStats) -> bool {
    let triple = |i: usize| (stats.n2[i], stats.n1[i], stats.n0[i]);
    (1..stats.n2.len()).all(|i| triple(i) == triple(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_of_six_depth_four() {
        let c = build_hea(6, 4, Topology::Ring).unwrap();
        assert_eq!(c.pairs().len(), 6);
        assert_eq!(c.num_two_qubit_gates(), 24);
        assert_eq!(c.num_params(), 72);
        assert_eq!(c.pairs().last(), Some(&(5, 0)));
    }

    #[test]
    fn line_of_six_depth_one() {
        let c = build_hea(6, 1, Topology::Line).unwrap();
        assert_eq!(c.pairs().len(), 5);
        assert_eq!(c.num_params(), 17);
    }

    #[test]
    fn two_qubit_ring_collapses() {
        let c = build_hea(2, 1, Topology::Ring).unwrap();
        assert_eq!(c.pairs(), &[(0, 1)]);
    }

    #[test]
    fn rejects_single_qubit_hea() {
        assert!(build_hea(1, 1, Topology::Ring).is_err());
        assert!(build_hea(3, 0, Topology::Ring).is_err());
        assert!(Circuit::layered(3, 1, vec![(0, 0)]).is_err());
        assert!(Circuit::layered(3, 1, vec![(0, 3)]).is_err());
    }

    #[test]
    fn layer_order_and_parameter_bijection() {
        let c = build_hea(3, 2, Topology::Ring).unwrap();
        let kinds: Vec<GateKind> = c.slots()[..9].iter().map(|s| s.kind).collect();
        use GateKind::*;
        assert_eq!(kinds, [Ry, Rx, Ry, Rx, Ry, Rx, Rzz, Rzz, Rzz]);
        let mut params: Vec<usize> = c.slots().iter().map(|s| s.param).collect();
        params.sort_unstable();
        assert_eq!(params, (0..c.num_params()).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(build_hea(5, 3, Topology::Line).unwrap(), build_hea(5, 3, Topology::Line).unwrap());
    }

    #[test]
    fn ring_stats() {
        let s = multigraph_stats(&build_hea(6, 4, Topology::Ring).unwrap());
        assert!(s.degree.iter().all(|&d| d == 8));
        assert!(s.n2.iter().all(|&v| v == 4));
        assert!(s.n1.iter().all(|&v| v == 12));
        assert!(s.n0.iter().all(|&v| v == 8));
        assert!(has_uniform_counts(&s));
    }

    #[test]
    fn line_stats() {
        let s = multigraph_stats(&build_hea(6, 4, Topology::Line).unwrap());
        assert_eq!((s.degree[0], s.degree[1]), (4, 8));
        assert_eq!(s.n1[0], 8);
        assert_eq!(s.n1[1], 12);
        assert!(!has_uniform_counts(&s));
    }

    #[test]
    fn single_pair_stats_go_negative() {
        let s = multigraph_stats(&build_hea(2, 1, Topology::Line).unwrap());
        assert_eq!((s.n2[0], s.n1[0], s.n0[0]), (1, 1, -1));
    }

    #[test]
    fn triangle_is_regular() {
        let s = multigraph_stats(&build_hea(3, 2, Topology::Ring).unwrap());
        assert!(has_uniform_counts(&s));
    }

    #[test]
    fn stats_sum_to_gate_count() {
        for (n, d, t) in [(5, 3, Topology::Line), (7, 2, Topology::Ring), (4, 5, Topology::Line)] {
            let c = build_hea(n, d, t).unwrap();
            let s = multigraph_stats(&c);
            for i in 0..c.pairs().len() {
                assert_eq!(s.n2[i] + s.n1[i] + s.n0[i], (c.pairs().len() * d) as i64);
                assert_eq!(s.n2[i], d as i64);
            }
        }
    }

    #[test]
    fn rings_are_regular_at_any_depth() {
        for n in 3..10 {
            for d in 1..5 {
                let s = multigraph_stats(&build_hea(n, d, Topology::Ring).unwrap());
                assert!(has_uniform_counts(&s), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn document_round_trip() {
        let c = build_hea(4, 2, Topology::Ring).unwrap();
        let json = serde_json::to_string(&c.to_document()).unwrap();
        assert!(json.contains("\"RZZ\""));
        let doc: CircuitDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(Circuit::try_from(doc).unwrap(), c);
    }
}
