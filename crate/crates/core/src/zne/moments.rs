//! Second moments of pulled-back error rates over the symmetric group, and
//! the resulting covariance between the circuit error sum and the first-order
//! deviation.

use serde::{Deserialize, Serialize};

use crate::ansatz::{Circuit, MultigraphStats};
use crate::error::{arg, Result};
use crate::noise::{enumerate_permutations, pair_rate_sum, ErrorModel, MAX_ENUMERATE};
use crate::perturbation::PerturbationProfile;

/// `<q_pi(a,b) q_pi(c,d)>` over uniform `pi` for two pairs that coincide
/// (`kappa2`), share one index (`kappa1`) or are disjoint (`kappa0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationMoments {
    pub kappa2: f64,
    pub kappa1: f64,
    pub kappa0: f64,
}

pub fn permutation_moments(model: &ErrorModel) -> Result<PermutationMoments> {
    let n = model.num_qubits();
    if n < 4 {
        return arg(format!("kappa0 needs at least 4 qubits, got {n}"));
    }
    let (mut p, mut k) = (0.0, 0.0);
    for (_, _, q) in model.pairs() {
        p += q;
        k += q * q;
    }
    let mut sum_sq_rows = 0.0;
    let mut sum_rows_sq = 0.0;
    for a in 0..n {
        let (s, q2) = (0..n).filter(|&b| b != a).map(|b| model.rate(a, b)).fold((0.0, 0.0), |(s, q2), q| (s + q, q2 + q * q));
        sum_sq_rows += s * s;
        sum_rows_sq += q2;
    }
    let nf = n as f64;
    let unordered = nf * (nf - 1.0) / 2.0;
    let triples = nf * (nf - 1.0) * (nf - 2.0);
    let quads = triples * (nf - 3.0);
    Ok(PermutationMoments {
        kappa2: k / unordered,
        kappa1: (sum_sq_rows - sum_rows_sq) / triples,
        kappa0: (4.0 * p * p - 4.0 * sum_sq_rows + 4.0 * k) / quads,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDecomposition {
    /// `eps_tilde[p] * (n2 kappa2 + n1 kappa1 + n0 kappa0)` for each pair.
    pub terms: Vec<f64>,
    pub total: f64,
}

/// `Cov(x, δy)` over all permutations, assembled pair by pair.
pub fn covariance_decomposition(
    profile: &PerturbationProfile,
    stats: &MultigraphStats,
    moments: &PermutationMoments,
) -> Result<CovarianceDecomposition> {
    let m = profile.eps_tilde.len();
    if stats.n2.len() != m || stats.n1.len() != m || stats.n0.len() != m {
        return arg("multigraph statistics and profile cover different pairs");
    }
    let terms: Vec<f64> = (0..m)
        .map(|p| {
            profile.eps_tilde[p]
                * (stats.n2[p] as f64 * moments.kappa2
                    + stats.n1[p] as f64 * moments.kappa1
                    + stats.n0[p] as f64 * moments.kappa0)
        })
        .collect();
    Ok(CovarianceDecomposition { total: terms.iter().sum(), terms })
}

/// Population covariance of `(CES, δy)` by enumerating `S_n`.
pub fn direct_covariance(profile: &PerturbationProfile, circuit: &Circuit, model: &ErrorModel) -> Result<f64> {
    let n = circuit.num_qubits();
    if n > MAX_ENUMERATE {
        return arg(format!("direct covariance enumerates S_n; n = {n} exceeds {MAX_ENUMERATE}"));
    }
    let d = circuit.depth() as f64;
    let pts: Vec<(f64, f64)> = enumerate_permutations(n)?
        .iter()
        .map(|pi| {
            let x = d * pair_rate_sum(circuit, model, pi);
            let dy = circuit
                .pairs()
                .iter()
                .zip(&profile.eps_tilde)
                .map(|(&(j, k), e)| e * model.pulled_back(pi, j, k))
                .sum::<f64>();
            (x, dy)
        })
        .collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    Ok(pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / len)
}
