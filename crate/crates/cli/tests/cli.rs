use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilab"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dilab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_deterministic() {
    let a = ok(&[
        "generate", "--model", "er", "--n", "500", "--lambda", "2", "--seed", "7",
    ]);
    let b = ok(&[
        "generate", "--model", "er", "--n", "500", "--lambda", "2", "--seed", "7",
    ]);
    let c = ok(&[
        "generate", "--model", "er", "--n", "500", "--lambda", "2", "--seed", "8",
    ]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("500 "));
    let cm = ok(&[
        "generate",
        "--model",
        "cm",
        "--n",
        "100",
        "--law",
        "regular:1",
        "--seed",
        "1",
    ]);
    assert_eq!(cm.lines().next(), Some("100 100"));
}

#[test]
fn generate_reports_bad_input() {
    let out = dilab(&["generate", "--model", "er", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--lambda"));
    assert_eq!(
        dilab(&["generate", "--model", "fixture", "--name", "nope"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn analyze_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("chain.txt");
    ok(&[
        "generate",
        "--model",
        "fixture",
        "--name",
        "scc-chain",
        "--params",
        "3,2",
        "--out",
        path(&g),
    ]);
    let report: Value =
        serde_json::from_str(&ok(&["analyze", "--in", path(&g), "--k", "1,2"])).unwrap();
    assert_eq!(report["giant"]["k_n"], 3);
    assert_eq!(report["giant"]["size_lscc"], 2);
    assert_eq!(report["i_max"], 6);
    assert_eq!(report["o_max"], 6);
    assert_eq!(report["counters"][0]["n_k_2"]["mode"], "exact");
    assert_eq!(report["counters"][1]["k"], 2);

    let out = dir.path().join("r.json");
    ok(&[
        "analyze",
        "--in",
        path(&g),
        "--pairs",
        "montecarlo:1000",
        "--out",
        path(&out),
    ]);
    let sampled: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(sampled["counters"][0]["n_k_2"]["std_err"].is_number());
    assert_eq!(
        dilab(&["analyze", "--in", path(&dir.path().join("missing.txt"))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn census_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("er.txt");
    ok(&[
        "generate",
        "--model",
        "er",
        "--n",
        "2000",
        "--lambda",
        "1.5",
        "--seed",
        "3",
        "--out",
        path(&g),
    ]);
    let full: Value = serde_json::from_str(&ok(&["census", "--in", path(&g), "--r", "2"])).unwrap();
    let total: f64 = full
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["freq"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);

    let out = dir.path().join("split.json");
    ok(&[
        "census",
        "--in",
        path(&g),
        "--r",
        "2",
        "--split-giant",
        "--out",
        path(&out),
    ]);
    let mass = |name: &str| -> f64 {
        let v: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
        v.as_array()
            .unwrap()
            .iter()
            .map(|e| e["freq"].as_f64().unwrap())
            .sum()
    };
    assert!((mass("split.giant.json") + mass("split.complement.json") - 1.0).abs() < 1e-9);

    let both: Value =
        serde_json::from_str(&ok(&["census", "--in", path(&g), "--split-giant"])).unwrap();
    assert!(both["giant"].is_array() && both["complement"].is_array());

    let bp: Value =
        serde_json::from_str(&ok(&["census", "--bp", "regular:1", "--reps", "100"])).unwrap();
    assert_eq!(bp.as_array().unwrap().len(), 1);
}

#[test]
fn limits_report() {
    let v: Value = serde_json::from_str(&ok(&[
        "limits",
        "--law",
        "poisson:2",
        "--k-list",
        "1,5",
        "--reps",
        "2000",
    ]))
    .unwrap();
    assert!((v["zeta"].as_f64().unwrap() - 0.634_91).abs() < 1e-4);
    assert!((v["giant_edge_density"].as_f64().unwrap() - 1.5278).abs() < 1e-3);
    assert_eq!(v["zeta_geq_k"][0]["value"], 1.0);
    let sub: Value = serde_json::from_str(&ok(&["limits", "--law", "poisson:0.5"])).unwrap();
    assert_eq!(sub["zeta"], 0.0);
    assert_eq!(
        dilab(&["limits", "--law", "poisson:2", "--tol", "0.1"])
            .status
            .code(),
        Some(2)
    );
}

const CONFIG: &str = r#"
out_dir = "out"
models = ["er:2"]
n_ladder = [1500]
seeds = 2
k_list = [3]
radii = [2]
census_reps = 3000
"#;

#[test]
fn sweep_verify_and_thread_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, CONFIG).unwrap();
    ok(&["sweep", "--config", path(&cfg)]);
    let results = dir.path().join("out/results.csv");
    let first = fs::read(&results).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_dilab"))
        .args(["sweep", "--config", path(&cfg)])
        .env("DILAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&results).unwrap(), first);

    let bad = Command::new(env!("CARGO_BIN_EXE_dilab"))
        .args(["sweep", "--config", path(&cfg)])
        .env("DILAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    // Small n: the verdict may go either way, but every criterion is reported.
    let verified = dilab(&["verify", "--config", path(&cfg)]);
    assert!(matches!(verified.status.code(), Some(0 | 1)));
    let report = String::from_utf8(verified.stdout).unwrap();
    assert!(report.contains(" giant-fraction [er:2 n=1500]"));
    assert!(report.lines().last().unwrap().ends_with("failed"));

    fs::write(&cfg, format!("{CONFIG}[tolerances]\nkn = 0.0\n")).unwrap();
    fs::remove_dir_all(dir.path().join("out")).unwrap();
    let failing = dilab(&["verify", "--config", path(&cfg)]);
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stdout).contains("FAIL scc-count"));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "models = []\nn_ladder = [10]\nseeds = 1\nout_dir = \"out\"\n",
    )
    .unwrap();
    assert_eq!(
        dilab(&["sweep", "--config", path(&cfg)]).status.code(),
        Some(2)
    );
    assert!(!dir.path().join("out").exists());
}
