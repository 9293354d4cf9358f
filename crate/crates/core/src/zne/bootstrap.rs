//! Bias-corrected and accelerated (BCa) bootstrap interval for the
//! intercept of a least-squares line.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::fit::linear_fit;
use crate::error::{arg, Error, Result};
use crate::rng;

pub const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapOptions {
    pub confidence: f64,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions { confidence: 0.95, resamples: 2000, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
    pub confidence: f64,
    pub resamples: usize,
    pub seed: u64,
    /// Bias correction `z0`.
    pub bias: f64,
    pub acceleration: f64,
}

/// Draw one pairs-resample; degenerate designs are redrawn from the same
/// stream. Returns the intercept and the number of draws used.
fn resample_intercept(samples: &[(f64, f64)], seed: u64, index: usize, max_draws: usize) -> Option<(f64, usize)> {
    let mut rng = rng::stream(seed, rng::STREAM_BOOTSTRAP + index as u64);
    let n = samples.len();
    let mut buf = Vec::with_capacity(n);
    for draw in 1..=max_draws {
        buf.clear();
        buf.extend((0..n).map(|_| samples[rng.random_range(0..n)]));
        if let Ok(fit) = linear_fit(&buf) {
            return Some((fit.intercept, draw));
        }
    }
    None
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn bootstrap_ci(samples: &[(f64, f64)], opts: &BootstrapOptions) -> Result<ConfidenceInterval> {
    if samples.len() < MIN_SAMPLES {
        return arg(format!("bootstrap needs at least {MIN_SAMPLES} samples, got {}", samples.len()));
    }
    if !(opts.confidence > 0.0 && opts.confidence < 1.0) || opts.resamples < 2 {
        return arg("confidence must lie in (0, 1) and resamples be at least 2");
    }
    let estimate = linear_fit(samples)?.intercept;

    // Each resample may redraw; the total budget is 10x the resample count.
    let budget = 10 * opts.resamples;
    let draws: Vec<Option<(f64, usize)>> = (0..opts.resamples)
        .into_par_iter()
        .map(|b| resample_intercept(samples, opts.seed, b, budget))
        .collect();
    let mut used = 0;
    let mut stats = Vec::with_capacity(opts.resamples);
    for d in draws {
        let (v, k) = d.ok_or_else(|| Error::Bootstrap("resample redraw cap reached".into()))?;
        used += k;
        stats.push(v);
    }
    if used > budget {
        return Err(Error::Bootstrap(format!("{used} draws exceed the cap of {budget}")));
    }
    stats.sort_by(f64::total_cmp);

    let normal = Normal::standard();
    let b = stats.len() as f64;
    let scale = estimate.abs().max(stats.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    if stats[stats.len() - 1] - stats[0] <= 1e-14 * scale.max(1e-300) {
        // no spread: every resample reproduces the estimate
        return Ok(ConfidenceInterval {
            low: stats[0].min(estimate),
            high: stats[stats.len() - 1].max(estimate),
            confidence: opts.confidence,
            resamples: opts.resamples,
            seed: opts.seed,
            bias: 0.0,
            acceleration: 0.0,
        });
    }
    let below = stats.iter().filter(|&&v| v < estimate).count() as f64;
    let ties = stats.iter().filter(|&&v| v == estimate).count() as f64;
    let prop = ((below + 0.5 * ties) / b).clamp(0.5 / b, 1.0 - 0.5 / b);
    let z0 = normal.inverse_cdf(prop);

    // jackknife acceleration
    let jack: Vec<f64> = (0..samples.len())
        .filter_map(|i| {
            let rest: Vec<(f64, f64)> = samples
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, s)| *s)
                .collect();
            linear_fit(&rest).ok().map(|f| f.intercept)
        })
        .collect();
    let jmean = jack.iter().sum::<f64>() / jack.len() as f64;
    let (num, den) = jack.iter().fold((0.0, 0.0), |(n3, n2), v| {
        let d = jmean - v;
        (n3 + d * d * d, n2 + d * d)
    });
    let acceleration = if den > 0.0 { num / (6.0 * den.powf(1.5)) } else { 0.0 };

    let alpha = 1.0 - opts.confidence;
    let adjusted = |a: f64| {
        let z = normal.inverse_cdf(a);
        normal.cdf(z0 + (z0 + z) / (1.0 - acceleration * (z0 + z)))
    };
    let lo_p = adjusted(alpha / 2.0);
    let hi_p = adjusted(1.0 - alpha / 2.0);
    Ok(ConfidenceInterval {
        low: quantile(&stats, lo_p),
        high: quantile(&stats, hi_p),
        confidence: opts.confidence,
        resamples: opts.resamples,
        seed: opts.seed,
        bias: z0,
        acceleration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal as NormalDist};

    fn noisy_line(n: usize, seed: u64, sigma: f64) -> Vec<(f64, f64)> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let noise = NormalDist::new(0.0, sigma).unwrap();
        (0..n)
            .map(|i| {
                let x = 0.01 + 0.001 * i as f64 + 0.0005 * rng.random::<f64>();
                (x, -3.0 + 2.0 * x + noise.sample(&mut rng))
            })
            .collect()
    }

    #[test]
    fn exact_line_has_zero_width() {
        let samples: Vec<(f64, f64)> = (0..30).map(|i| (i as f64 * 1e-3, -7.5 + 3.0 * i as f64 * 1e-3)).collect();
        let ci = bootstrap_ci(&samples, &BootstrapOptions::default()).unwrap();
        assert!(ci.high - ci.low <= 1e-10, "{ci:?}");
        assert!((ci.low + 7.5).abs() < 1e-10);
    }

    #[test]
    fn interval_is_ordered_and_deterministic() {
        let samples = noisy_line(50, 3, 1e-3);
        let opts = BootstrapOptions { seed: 11, ..Default::default() };
        let a = bootstrap_ci(&samples, &opts).unwrap();
        assert!(a.low <= a.high);
        assert_eq!(a, bootstrap_ci(&samples, &opts).unwrap());
        assert!(a.low < -3.0 + 0.01 && a.high > -3.0 - 0.01);
    }

    #[test]
    fn covers_truth_at_roughly_nominal_rate() {
        let mut hits = 0;
        let reps = 60;
        for rep in 0..reps {
            let samples = noisy_line(40, 100 + rep, 2e-3);
            let ci = bootstrap_ci(&samples, &BootstrapOptions { resamples: 1000, seed: rep, ..Default::default() }).unwrap();
            if ci.low <= -3.0 && -3.0 <= ci.high {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.85 * reps as f64, "{hits}/{reps}");
    }

    #[test]
    fn resample_count_is_converged() {
        // doubling the resamples moves each endpoint by < 5% of the width
        let samples = noisy_line(50, 8, 1e-3);
        let a = bootstrap_ci(&samples, &BootstrapOptions { resamples: 2000, seed: 1, ..Default::default() }).unwrap();
        let b = bootstrap_ci(&samples, &BootstrapOptions { resamples: 4000, seed: 2, ..Default::default() }).unwrap();
        let width = a.high - a.low;
        assert!((a.low - b.low).abs() < 0.05 * width, "{a:?} {b:?}");
        assert!((a.high - b.high).abs() < 0.05 * width, "{a:?} {b:?}");
    }

    #[test]
    fn rejects_small_and_degenerate_inputs() {
        assert!(bootstrap_ci(&noisy_line(9, 0, 1e-3), &Default::default()).is_err());
        let flat: Vec<(f64, f64)> = (0..20).map(|i| (1.0, i as f64)).collect();
        assert!(matches!(bootstrap_ci(&flat, &Default::default()), Err(Error::DegenerateDesign { .. })));
    }

    #[test]
    fn redraw_cap() {
        // 19 identical abscissae and a single distinct one: most resamples are
        // degenerate, but the cap is generous enough for them to succeed.
        let mut pts: Vec<(f64, f64)> = (0..19).map(|i| (0.0, i as f64 * 1e-3)).collect();
        pts.push((1.0, 1.0));
        let ci = bootstrap_ci(&pts, &BootstrapOptions { resamples: 200, ..Default::default() }).unwrap();
        assert!(ci.low <= ci.high);
    }
}
