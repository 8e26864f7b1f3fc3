use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_decay-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn out_dir(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn heat_gaussian_passes_with_slope_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "heat-gaussian", "--n", "2", "--alpha", "1", "--beta", "1", "--out", out_dir(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!((report["results"]["slope"].as_f64().unwrap() + 1.0).abs() <= 0.05);
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,energy,bound_lower,bound_upper"));
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn norate_ratio_reaches_one_minus_eps() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "norate", "--T", "100", "--eps", "0.1", "--json", "--out", out_dir(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ratio = report["results"]["cases"][0]["ratio"].as_f64().unwrap();
    assert!(ratio >= 0.9 * (1.0 - 1e-9), "{ratio}");
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let o = run(&["run", "unknown-exp"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("usage") && err.contains("heat-gaussian"), "{err}");
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(run(&["run", "heat-gaussian", "--window", "1"]).status.code(), Some(1));
    assert_eq!(run(&["run", "heat-gaussian", "--tol", "slope=-1"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn quantitative_failure_exits_two() {
    // A zero slope tolerance cannot be met by a fitted slope.
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "heat-gaussian", "--tol", "slope=0", "--out", out_dir(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, "x").unwrap();
    let o = run(&["run", "optimality", "--out", file.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn list_covers_every_criterion_once() {
    let o = run(&["list", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let cat: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(cat.len() >= 10);
    let mut crits: Vec<u64> = cat.iter().filter_map(|e| e["criterion"].as_u64()).collect();
    crits.sort_unstable();
    assert_eq!(crits, (1..=9).collect::<Vec<_>>());
    let plain = run(&["list"]);
    assert!(String::from_utf8_lossy(&plain.stdout).lines().count() >= 10);
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = bin()
            .args(["run", "modified-poincare", "--seed", "3", "--out", out_dir(d.path())])
            .env("DECAYLAB_THREADS", "2")
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["report.json", "trace.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, threads) in [(&a, "1"), (&b, "4")] {
        let o = bin()
            .args(["run", "exp-decay", "--out", out_dir(d.path())])
            .env("DECAYLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a.path().join("report.json")).unwrap(), std::fs::read(b.path().join("report.json")).unwrap());
}

#[test]
fn invalid_thread_count_is_rejected() {
    let o = bin().args(["list"]).env("DECAYLAB_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_config_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "experiment = \"norate\"\n[params]\nT = 10.0\n").unwrap();
    assert_eq!(run(&["validate-config", good.to_str().unwrap()]).status.code(), Some(0));

    let neg = dir.path().join("neg.toml");
    std::fs::write(&neg, "experiment = \"norate\"\n[tolerances]\nrelative = -1e-3\n").unwrap();
    let o = run(&["validate-config", neg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("tolerances.relative"), "{err}");

    let missing = dir.path().join("missing.toml");
    std::fs::write(&missing, "seed = 1\n").unwrap();
    let o = run(&["validate-config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment"));
}

#[test]
fn config_drives_a_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!("experiment = \"norate\"\nout = {:?}\n[params]\nT = 10.0\neps = 0.5\n", out.to_str().unwrap()),
    )
    .unwrap();
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--eps", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["params"]["T"], 10.0);
    assert_eq!(report["params"]["eps"], 0.2);
}

#[test]
fn probe_style_trace_for_limit_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "fpi", "--out", out_dir(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("rho,value"));
}
