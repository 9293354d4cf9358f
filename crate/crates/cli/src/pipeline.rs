use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use permzne::hamiltonian::gap_of;
use permzne::noise::{enumerate_permutations, factorial, sample_error_table, sample_permutations};
use permzne::perturbation::{compute_profile, deviation_bounds, relative_deviation, DEGENERATE_DELTA};
use permzne::rng::derive_seed;
use permzne::vqe::{auto_depth, optimize_multistart, DepthScanRow};
use permzne::zne::{
    from_samples, linear_fit, sample_energies, write_samples_csv, ConfidenceInterval, EnergyMode, FitOutcome, Sample,
};
use permzne::{
    build_hea, Circuit, ErrorModel, PauliHamiltonian, Permutation, PerturbationProfile, VqeOutcome, ZneResult,
};
use serde::{Deserialize, Serialize};

use crate::config::{DepthSpec, ExperimentConfig, PermutationSpec};
use crate::svg;

/// Auto-depth search ended without meeting the accuracy target.
#[derive(Debug)]
pub struct DepthUnreachable {
    pub max_depth: usize,
    pub best_relative_error: f64,
}

impl std::fmt::Display for DepthUnreachable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "no depth up to {} reached the accuracy target (best relative error {:.3e})",
            self.max_depth, self.best_relative_error
        )
    }
}

impl std::error::Error for DepthUnreachable {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeReport {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub ground_energy: f64,
    pub spectral_gap: Option<f64>,
    /// Per-depth results of the auto-depth search; empty for a fixed depth.
    pub scan: Vec<DepthScanRow>,
    pub target_met: bool,
    pub depth: usize,
    pub outcome: VqeOutcome,
    /// `E* - E_ground`.
    pub error: f64,
    pub relative_error: Option<f64>,
}

/// Everything downstream stages need from the optimisation.
pub struct Prepared {
    pub report: VqeReport,
    pub h: PauliHamiltonian,
    pub circuit: Circuit,
}

impl Prepared {
    fn theta(&self) -> &[f64] {
        &self.report.outcome.theta_star
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Run (or load) the optimisation without writing anything.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let h = config.hamiltonian()?;
    if let Some(path) = &config.vqe_input {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let report: VqeReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let same = report.config.n == config.n
            && report.config.topology == config.topology
            && report.config.hamiltonian == config.hamiltonian
            && (report.config.depth == config.depth || config.depth == DepthSpec::Fixed(report.depth));
        if !same {
            bail!("{} was produced for a different experiment", path.display());
        }
        if !report.target_met {
            bail!("{} records an unmet depth target", path.display());
        }
        let circuit = build_hea(config.n, report.depth, config.topology)?;
        return Ok(Prepared { report, h, circuit });
    }

    let spectrum = h.exact_spectrum()?;
    let ground = spectrum[0];
    let gap = gap_of(&spectrum);
    let seeds = config.vqe_seeds();
    let opts = &config.vqe.options;
    let (scan, depth, outcome, target_met) = match config.depth {
        DepthSpec::Fixed(depth) => {
            let circuit = build_hea(config.n, depth, config.topology)?;
            (vec![], depth, optimize_multistart(&circuit, &h, &seeds, opts)?, true)
        }
        DepthSpec::Auto(_) => {
            let (rows, hit) =
                auto_depth(config.n, config.topology, &h, config.vqe.max_depth, config.vqe.depth_fraction, &seeds, opts)?;
            let last = rows.last().ok_or_else(|| anyhow!("empty depth scan"))?;
            let (depth, outcome) = (last.depth, last.best.clone());
            (rows, depth, outcome, hit.is_some())
        }
    };
    let error = outcome.energy - ground;
    let report = VqeReport {
        config: config.clone(),
        seeds,
        ground_energy: ground,
        spectral_gap: gap,
        scan,
        target_met,
        depth,
        error,
        relative_error: gap.map(|g| error / g),
        outcome,
    };
    info!("depth {depth}: E* = {:.12}, E* - E_ground = {error:.3e}", report.outcome.energy);
    let circuit = build_hea(config.n, depth, config.topology)?;
    Ok(Prepared { report, h, circuit })
}

fn check_target(report: &VqeReport) -> Result<()> {
    if report.target_met {
        return Ok(());
    }
    Err(DepthUnreachable {
        max_depth: report.config.vqe.max_depth,
        best_relative_error: report.scan.iter().map(|r| r.relative_error).fold(f64::INFINITY, f64::min),
    }
    .into())
}

/// `vqe`: optimise and write `vqe.json`. Fails with [`DepthUnreachable`]
/// after writing the report when the auto-depth target was missed.
pub fn cmd_vqe(config: &ExperimentConfig, out: &Path) -> Result<VqeReport> {
    fs::create_dir_all(out)?;
    let prepared = prepare(config)?;
    write_json(&out.join("vqe.json"), &prepared.report)?;
    check_target(&prepared.report)?;
    Ok(prepared.report)
}

pub fn permutations(config: &ExperimentConfig) -> Result<Vec<Permutation>> {
    Ok(match config.permutations {
        PermutationSpec::All(_) => enumerate_permutations(config.n)?,
        PermutationSpec::Sample { sample } => sample_permutations(config.n, sample.count, sample.seed)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeSummary {
    pub depth: usize,
    pub energy: f64,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub ground_energy: f64,
    pub spectral_gap: Option<f64>,
    pub theta_star: Vec<f64>,
}

impl From<&VqeReport> for VqeSummary {
    fn from(r: &VqeReport) -> Self {
        VqeSummary {
            depth: r.depth,
            energy: r.outcome.energy,
            seed: r.outcome.seed,
            seeds: r.seeds.clone(),
            ground_energy: r.ground_energy,
            spectral_gap: r.spectral_gap,
            theta_star: r.outcome.theta_star.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub e0: f64,
    pub mean_insertion: f64,
    pub delta: f64,
    pub max_abs_eps_tilde: f64,
    pub eps_tilde: Vec<f64>,
}

impl From<&PerturbationProfile> for ProfileSummary {
    fn from(p: &PerturbationProfile) -> Self {
        ProfileSummary {
            e0: p.e0,
            mean_insertion: p.mean,
            delta: p.delta(),
            max_abs_eps_tilde: p.max_abs_eps_tilde(),
            eps_tilde: p.eps_tilde.clone(),
        }
    }
}

/// Measured relative deviation against `min(B1, B2)` for every permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub checked: usize,
    pub violations: usize,
    /// `max (measured - bound)`; negative when every bound holds.
    pub max_excess: Option<f64>,
    pub max_measured: Option<f64>,
    pub min_bound: Option<f64>,
    /// `|A - E0|` below tolerance; the bounds are then infinite and the other
    /// fields absent.
    pub degenerate: bool,
}

pub const BOUND_SLACK: f64 = 1e-12;

pub fn check_bounds(
    profile: &PerturbationProfile,
    circuit: &Circuit,
    model: &ErrorModel,
    perms: &[Permutation],
) -> Result<BoundsCheck> {
    let degenerate = profile.delta().abs() <= DEGENERATE_DELTA;
    let mut check =
        BoundsCheck { checked: perms.len(), violations: 0, max_excess: None, max_measured: None, min_bound: None, degenerate };
    if degenerate {
        return Ok(check);
    }
    let (mut excess, mut measured_max, mut bound_min) = (f64::NEG_INFINITY, 0.0f64, f64::INFINITY);
    for pi in perms {
        let bound = deviation_bounds(profile, model, pi, circuit)?.bound;
        let measured = relative_deviation(profile, circuit, model, pi)?;
        if measured > bound + BOUND_SLACK {
            check.violations += 1;
        }
        excess = excess.max(measured - bound);
        measured_max = measured_max.max(measured);
        bound_min = bound_min.min(bound);
    }
    check.max_excess = Some(excess);
    check.max_measured = Some(measured_max);
    check.min_bound = Some(bound_min);
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneReport {
    pub config: ExperimentConfig,
    pub vqe: VqeSummary,
    pub error_table: ErrorModel,
    pub result: ZneResult,
    /// `|alpha - E0|`.
    pub extrapolation_error: f64,
    /// `min_pi (E - E0) / |alpha - E0|`.
    pub improvement: f64,
    pub error_over_gap: Option<f64>,
    pub profile: ProfileSummary,
    pub bounds: BoundsCheck,
    pub warnings: Vec<String>,
}

fn attach_ci(result: &mut ZneResult, config: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<()> {
    let Some(opts) = config.bootstrap else { return Ok(()) };
    if matches!(result.fit, FitOutcome::Degenerate { .. }) {
        return Ok(());
    }
    if result.samples.len() < permzne::zne::MIN_SAMPLES {
        warnings.push(format!("bootstrap skipped: only {} samples", result.samples.len()));
        return Ok(());
    }
    result.attach_bootstrap(&opts)?;
    Ok(())
}

/// Build a ZNE report from a prepared optimisation; writes nothing.
pub fn zne_report(config: &ExperimentConfig, prepared: &Prepared) -> Result<ZneReport> {
    check_target(&prepared.report)?;
    let model = sample_error_table(config.n, config.q_max, config.table_seed)?;
    let perms = permutations(config)?;
    let profile = compute_profile(&prepared.circuit, prepared.theta(), &prepared.h)?;
    let samples = sample_energies(
        &prepared.circuit,
        prepared.theta(),
        &prepared.h,
        &model,
        &perms,
        config.energy_mode,
        Some(&profile),
    )?;
    let mut result = from_samples(config.energy_mode, profile.e0, samples)?;
    let mut warnings = Vec::new();
    if let FitOutcome::Degenerate { ces, .. } = result.fit {
        let msg = format!("degenerate design: every sample has CES = {ces}; reporting the mean energy");
        warn!("{msg}");
        warnings.push(msg);
    }
    attach_ci(&mut result, config, &mut warnings)?;
    result.attach_moments(&prepared.circuit, &model, Some(&profile))?;
    let bounds = check_bounds(&profile, &prepared.circuit, &model, &perms)?;
    let error = result.error();
    info!(
        "intercept {:.12}, |alpha - E0| = {error:.3e}, min(E - E0) = {:.3e}, ratio {:.1}",
        result.intercept(),
        result.diagnostics.min_energy_shift,
        result.improvement()
    );
    Ok(ZneReport {
        config: config.clone(),
        vqe: (&prepared.report).into(),
        error_table: model,
        improvement: result.improvement(),
        extrapolation_error: error,
        error_over_gap: prepared.report.spectral_gap.map(|g| error / g),
        profile: (&profile).into(),
        bounds,
        warnings,
        result,
    })
}

fn write_samples(path: &Path, samples: &[Sample]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_samples_csv(samples, std::io::BufWriter::new(file))?;
    Ok(())
}

/// `zne`: writes `zne.json`, `samples.csv` and optionally `zne.svg`.
pub fn cmd_zne(config: &ExperimentConfig, out: &Path, with_svg: bool) -> Result<ZneReport> {
    fs::create_dir_all(out)?;
    let prepared = prepare(config)?;
    let report = zne_report(config, &prepared)?;
    write_json(&out.join("zne.json"), &report)?;
    write_samples(&out.join("samples.csv"), &report.result.samples)?;
    if with_svg {
        let plot = svg::Plot {
            title: format!("n={} depth {}: energy against circuit error sum", config.n, report.vqe.depth),
            x_label: "CES".into(),
            y_label: "energy".into(),
            points: report.result.points(),
            line: report.result.slope().map(|s| (report.result.intercept(), s)),
            reference: Some(report.result.e0),
            log_axes: false,
        };
        fs::write(out.join("zne.svg"), plot.render())?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub q_max: f64,
    pub intercept: f64,
    pub slope: Option<f64>,
    pub error: f64,
    pub min_energy_shift: f64,
    pub ci: Option<ConfidenceInterval>,
    /// `max(q) |T| d`.
    pub load: f64,
    pub below_gap: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub vqe: VqeSummary,
    /// Table drawn with `q_max = 1` and scaled to each point.
    pub relative_table: ErrorModel,
    pub permutation_ranks: Vec<u64>,
    pub points: Vec<SweepPoint>,
    /// Slope of `ln |alpha - E0|` against `ln q_max`.
    pub loglog_slope: Option<f64>,
    pub notices: Vec<String>,
}

pub fn sweep_report(config: &ExperimentConfig, prepared: &Prepared) -> Result<SweepReport> {
    check_target(&prepared.report)?;
    let base = sample_error_table(config.n, 1.0, config.table_seed)?;
    let perms = permutations(config)?;
    let profile = match config.energy_mode {
        EnergyMode::FirstOrder => Some(compute_profile(&prepared.circuit, prepared.theta(), &prepared.h)?),
        EnergyMode::ExactSim => None,
    };
    let e0 = prepared.report.outcome.energy;
    let gap = prepared.report.spectral_gap;
    let gates = prepared.circuit.num_two_qubit_gates() as f64;
    let mut notices = Vec::new();
    let mut points = Vec::new();
    for &q in &config.sweep.q_max_values {
        let model = base.scaled(q)?;
        let samples = sample_energies(
            &prepared.circuit,
            prepared.theta(),
            &prepared.h,
            &model,
            &perms,
            config.energy_mode,
            profile.as_ref(),
        )?;
        let mut result = from_samples(config.energy_mode, e0, samples)?;
        attach_ci(&mut result, config, &mut notices)?;
        let error = result.error();
        info!("q_max {q:e}: |alpha - E0| = {error:.3e}");
        points.push(SweepPoint {
            q_max: q,
            intercept: result.intercept(),
            slope: result.slope(),
            error,
            min_energy_shift: result.diagnostics.min_energy_shift,
            ci: result.ci,
            load: model.max_rate() * gates,
            below_gap: gap.map(|g| error < g),
        });
    }
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|p| p.q_max > 0.0 && p.error > 0.0).map(|p| (p.q_max.ln(), p.error.ln())).collect();
    let loglog_slope = match linear_fit(&logs) {
        Ok(fit) => Some(fit.slope),
        Err(_) => {
            notices.push("log-log slope omitted: fewer than two distinct non-zero points".into());
            None
        }
    };
    Ok(SweepReport {
        config: config.clone(),
        vqe: (&prepared.report).into(),
        relative_table: base,
        permutation_ranks: perms.iter().map(|p| p.rank()).collect::<permzne::Result<_>>()?,
        points,
        loglog_slope,
        notices,
    })
}

/// `sweep`: writes `sweep.json` and optionally a log-log `sweep.svg`.
pub fn cmd_sweep(config: &ExperimentConfig, out: &Path, with_svg: bool) -> Result<SweepReport> {
    fs::create_dir_all(out)?;
    let prepared = prepare(config)?;
    let report = sweep_report(config, &prepared)?;
    write_json(&out.join("sweep.json"), &report)?;
    if with_svg {
        let points: Vec<(f64, f64)> = report
            .points
            .iter()
            .filter(|p| p.q_max > 0.0 && p.error > 0.0)
            .map(|p| (p.q_max.log10(), p.error.log10()))
            .collect();
        let line = linear_fit(&points).ok().map(|f| (f.intercept, f.slope));
        let plot = svg::Plot {
            title: "extrapolation error against q_max".into(),
            x_label: "log10 q_max".into(),
            y_label: "log10 |alpha - E0|".into(),
            points,
            line,
            reference: None,
            log_axes: true,
        };
        fs::write(out.join("sweep.svg"), plot.render())?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub depth: usize,
    pub pool_size: usize,
    pub repetitions: usize,
    pub mean_error: f64,
    /// Sample standard deviation; absent for a single repetition.
    pub std_error: Option<f64>,
    pub max_error: f64,
    pub errors: Vec<f64>,
    pub permutation_seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingInstance {
    pub n: usize,
    pub vqe: VqeSummary,
    pub error_table: ErrorModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub config: ExperimentConfig,
    pub instances: Vec<ScalingInstance>,
    pub rows: Vec<ScalingRow>,
    pub notices: Vec<String>,
}

fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    let std = (values.len() > 1)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0)).sqrt());
    (mean, std)
}

/// Repetition seed for pool size `pool` and repetition `rep`.
pub fn repetition_seed(base: u64, pool: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(base, pool as u64), rep as u64)
}

/// Repetitions for one prepared instance. The table is fixed; every
/// repetition draws a fresh permutation pool. Energies are evaluated once per
/// distinct permutation.
pub fn scaling_rows(
    config: &ExperimentConfig,
    prepared: &Prepared,
    notices: &mut Vec<String>,
) -> Result<(ErrorModel, Vec<ScalingRow>)> {
    check_target(&prepared.report)?;
    let n = config.n;
    let model = sample_error_table(n, config.q_max, config.table_seed)?;
    let reps = config.scaling.repetitions;
    let mut plan: Vec<(usize, Vec<u64>, Vec<Vec<Permutation>>)> = Vec::new();
    for &pool in &config.scaling.pool_sizes {
        if n > permzne::noise::MAX_RANKED || (pool as u64) > factorial(n) {
            notices.push(format!("n={n}: pool size {pool} exceeds n! and was skipped"));
            continue;
        }
        let seeds: Vec<u64> = (0..reps).map(|r| repetition_seed(config.scaling.seed, pool, r)).collect();
        let pools = seeds.iter().map(|&s| sample_permutations(n, pool, s)).collect::<permzne::Result<Vec<_>>>()?;
        plan.push((pool, seeds, pools));
    }
    let mut unique: BTreeMap<u64, Permutation> = BTreeMap::new();
    for (_, _, pools) in &plan {
        for pi in pools.iter().flatten() {
            unique.entry(pi.rank()?).or_insert_with(|| pi.clone());
        }
    }
    let distinct: Vec<Permutation> = unique.into_values().collect();
    let theta = prepared.theta();
    let profile = match config.energy_mode {
        EnergyMode::FirstOrder => Some(compute_profile(&prepared.circuit, theta, &prepared.h)?),
        EnergyMode::ExactSim => None,
    };
    let energies: BTreeMap<u64, Sample> =
        sample_energies(&prepared.circuit, theta, &prepared.h, &model, &distinct, config.energy_mode, profile.as_ref())?
            .into_iter()
            .map(|s| (s.permutation_lehmer, s))
            .collect();
    let e0 = prepared.report.outcome.energy;
    let mut rows = Vec::new();
    for (pool, seeds, pools) in plan {
        let errors = pools
            .iter()
            .map(|perms| {
                let samples = perms.iter().map(|pi| Ok(energies[&pi.rank()?])).collect::<permzne::Result<Vec<_>>>()?;
                Ok(from_samples(config.energy_mode, e0, samples)?.error())
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, std) = mean_std(&errors);
        info!("n={n} pool {pool}: mean {mean:.3e}, std {std:?}");
        rows.push(ScalingRow {
            n,
            depth: prepared.report.depth,
            pool_size: pool,
            repetitions: reps,
            mean_error: mean,
            std_error: std,
            max_error: errors.iter().cloned().fold(0.0, f64::max),
            errors,
            permutation_seeds: seeds,
        });
    }
    Ok((model, rows))
}

/// `scaling`: writes `scaling.json` and `scaling.csv`.
pub fn cmd_scaling(config: &ExperimentConfig, out: &Path) -> Result<ScalingReport> {
    fs::create_dir_all(out)?;
    let mut report = ScalingReport { config: config.clone(), instances: vec![], rows: vec![], notices: vec![] };
    let counts = config.qubit_counts();
    for &n in &counts {
        let mut sub = config.with_n(n);
        if counts.len() > 1 {
            sub.vqe_input = None;
        }
        let prepared = prepare(&sub)?;
        let (table, rows) = scaling_rows(&sub, &prepared, &mut report.notices)?;
        report.instances.push(ScalingInstance { n, vqe: (&prepared.report).into(), error_table: table });
        report.rows.extend(rows);
    }
    write_json(&out.join("scaling.json"), &report)?;
    let mut w = csv::Writer::from_path(out.join("scaling.csv"))?;
    w.write_record(["n", "depth", "pool_size", "repetitions", "mean_error", "std_error"])?;
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            r.depth.to_string(),
            r.pool_size.to_string(),
            r.repetitions.to_string(),
            r.mean_error.to_string(),
            r.std_error.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(report)
}
