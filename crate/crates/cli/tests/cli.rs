use std::path::Path;
use std::process::Command;
use std::time::Instant;

use permzne_cli::config::{DepthSpec, PermutationSpec, SampleSpec};
use permzne_cli::pipeline::{prepare, scaling_rows, sweep_report, ZneReport};
use permzne_cli::{cmd_scaling, cmd_vqe, cmd_zne, ExperimentConfig};

fn config(json: &str) -> ExperimentConfig {
    let c: ExperimentConfig = serde_json::from_str(json).unwrap();
    c.validate().unwrap();
    c
}

fn run_binary(sub: &str, cfg: &str, dir: &Path, extra: &[&str]) -> std::process::Output {
    let path = dir.join("config.json");
    std::fs::write(&path, cfg).unwrap();
    Command::new(env!("CARGO_BIN_EXE_permzne"))
        .args([sub, "--config", path.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap(), "--jobs", "1"])
        .args(extra)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

#[test]
fn zne_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_binary("zne", r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": 3, "table_seed": 2}"#, dir.path(), &["--svg"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("out");
    for f in ["zne.json", "samples.csv", "zne.svg"] {
        assert!(o.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(o.join("samples.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("permutation_lehmer,ces,energy"));
    assert_eq!(csv.lines().count(), 25);
    let report: ZneReport = serde_json::from_slice(&std::fs::read(o.join("zne.json")).unwrap()).unwrap();
    assert_eq!(report.config.table_seed, 2);
    assert!(report.result.ci.is_some());
    assert_eq!(report.bounds.violations, 0);
}

#[test]
fn zero_noise_is_a_warning_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_binary("zne", r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": 1, "q_max": 0}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: ZneReport =
        serde_json::from_slice(&std::fs::read(dir.path().join("out/zne.json")).unwrap()).unwrap();
    assert!(report.warnings.iter().any(|w| w.contains("degenerate")));
    assert!(report.extrapolation_error < 1e-12);
}

#[test]
fn invalid_config_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_binary("zne", r#"{"n": 4, "depth": 1}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_binary("vqe", r#"{"n": 9, "hamiltonian": {"type": "a"}, "depth": 1}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_depth_exit_code_keeps_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": "auto", "vqe": {"max_depth": 1}}"#;
    let out = run_binary("vqe", cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("out/vqe.json").exists());
}

#[test]
fn two_qubit_vqe_is_fast_and_variational() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let report = cmd_vqe(&config(r#"{"n": 2, "hamiltonian": {"type": "a"}, "depth": 1}"#), dir.path()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!(report.outcome.energy >= report.ground_energy - 1e-12);
}

#[test]
fn auto_depth_type_a_selects_four() {
    let report = prepare(&config(r#"{"n": 6, "hamiltonian": {"type": "a"}, "depth": "auto"}"#)).unwrap().report;
    assert!(report.target_met);
    assert_eq!(report.depth, 4);
    assert_eq!(report.scan.len(), 4);
    assert!((report.spectral_gap.unwrap() - 0.26).abs() < 0.02);
}

#[test]
fn auto_depth_type_b_meets_target() {
    let report = prepare(&config(r#"{"n": 6, "hamiltonian": {"type": "b"}, "depth": "auto"}"#)).unwrap().report;
    assert!(report.target_met);
    assert!(report.relative_error.unwrap() <= 1e-2);
}

#[test]
fn reusing_a_vqe_result_matches_inline_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(r#"{"n": 4, "topology": "line", "hamiltonian": {"type": "b"}, "depth": 2, "bootstrap": null}"#);
    cmd_vqe(&c, dir.path()).unwrap();
    let inline = cmd_zne(&c, &dir.path().join("inline"), false).unwrap();
    c.vqe_input = Some(dir.path().join("vqe.json"));
    let reused = cmd_zne(&c, &dir.path().join("reused"), false).unwrap();
    assert_eq!(inline.result, reused.result);

    let mut other = c.clone();
    other.depth = DepthSpec::Fixed(3);
    assert!(prepare(&other).is_err());
}

#[test]
fn sweep_with_single_point_omits_slope() {
    let mut c = config(r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": 2, "sweep": {"q_max_values": [1e-3]}}"#);
    c.permutations = PermutationSpec::Sample { sample: SampleSpec { count: 12, seed: 1 } };
    let r = sweep_report(&c, &prepare(&c).unwrap()).unwrap();
    assert_eq!(r.points.len(), 1);
    assert!(r.loglog_slope.is_none());
    assert!(!r.notices.is_empty());
}

#[test]
fn large_rates_flag_gap_comparison() {
    let c = config(
        r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": 3, "bootstrap": null,
            "sweep": {"q_max_values": [1e-3, 0.08]}}"#,
    );
    let p = prepare(&c).unwrap();
    let r = sweep_report(&c, &p).unwrap();
    let last = r.points.last().unwrap();
    // max(q) |T| d is of order one at the largest rate
    assert!(last.load > 0.5 && last.load < 1.0, "{}", last.load);
    assert!(last.below_gap.is_some());
}

#[test]
fn single_repetition_has_no_std() {
    let mut c = config(r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": 2}"#);
    c.scaling.repetitions = 1;
    c.scaling.pool_sizes = vec![10, 100];
    let mut notices = Vec::new();
    let (_, rows) = scaling_rows(&c, &prepare(&c).unwrap(), &mut notices).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].std_error.is_none());
    assert!(notices[0].contains("100"));
}

#[test]
fn error_spread_grows_with_qubit_count() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        r#"{"n": 4, "hamiltonian": {"type": "a"}, "depth": "auto",
            "scaling": {"n_values": [4, 6], "repetitions": 50, "pool_sizes": [20]}}"#,
    );
    let r = cmd_scaling(&c, dir.path()).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert!(r.rows[1].std_error.unwrap() > r.rows[0].std_error.unwrap(), "{:?}", r.rows);
    assert!(dir.path().join("scaling.csv").exists());
}
