use std::fs;
use std::path::Path;

use dilab::experiment::{run_sweep, verify, ExperimentConfig};

fn config(dir: &Path, body: &str) -> ExperimentConfig {
    let text = format!("out_dir = \"out\"\n{body}");
    fs::write(dir.join("sweep.toml"), &text).unwrap();
    ExperimentConfig::load(dir.join("sweep.toml")).unwrap()
}

const SMALL: &str = r#"
models = ["er:2", "cm:regular:2"]
n_ladder = [1000, 2000]
seeds = 3
k_list = [2, 10]
radii = [1, 2]
census_reps = 5000
"#;

#[test]
fn sweep_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "models = [\"er:2\"]\nn_ladder = [1000]\nseeds = 3\n",
    );
    let out = run_sweep(&cfg, false).unwrap();
    assert_eq!(out.rows.len(), 3);
    assert!(out.failures.is_empty());
    for r in &out.rows {
        assert!(r.lscc_frac > 0.0 && r.lscc_frac < 1.0);
        assert!((0.0..=1.0).contains(&r.kn_frac) && (0.0..=1.0).contains(&r.alpha1));
        assert_eq!(r.theory_zeta, out.rows[0].theory_zeta);
    }
    let csv = fs::read_to_string(cfg.results_path()).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("model,n,seed,lscc_frac,second_frac,kn_frac,alpha1,"));
    assert!(cfg.timings_path().exists() && cfg.limits_path().exists());
}

fn sweep_bytes(threads: usize) -> String {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &format!("{SMALL}threads = {threads}\n"));
    run_sweep(&cfg, false).unwrap();
    fs::read_to_string(cfg.results_path()).unwrap()
}

#[test]
fn sweeps_are_reproducible_across_thread_budgets() {
    let one = sweep_bytes(1);
    assert_eq!(one.lines().count(), 1 + 2 * 2 * 3);
    assert_eq!(one, sweep_bytes(1));
    assert_eq!(one, sweep_bytes(3));
}

#[test]
fn rows_follow_job_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = run_sweep(&cfg, false).unwrap();
    let keys: Vec<(String, usize)> = out.rows.iter().map(|r| (r.model.clone(), r.n)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by_key(|(m, n)| (m != "er:2", *n));
    assert_eq!(keys, sorted);
}

#[test]
fn resume_completes_a_truncated_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    run_sweep(&cfg, false).unwrap();
    let full = fs::read(cfg.results_path()).unwrap();

    // Cut mid-way through the fifth data row, as a crash would.
    let text = String::from_utf8(full.clone()).unwrap();
    let cut: usize = text.lines().take(5).map(|l| l.len() + 1).sum::<usize>() + 7;
    fs::write(cfg.results_path(), &full[..cut]).unwrap();
    let out = run_sweep(&cfg, true).unwrap();
    assert_eq!(out.resumed, 4);
    assert_eq!(fs::read(cfg.results_path()).unwrap(), full);

    // A finished sweep resumes to itself.
    let again = run_sweep(&cfg, true).unwrap();
    assert_eq!(again.resumed, 12);
    assert_eq!(fs::read(cfg.results_path()).unwrap(), full);
}

#[test]
fn resume_refuses_a_foreign_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    fs::create_dir_all(&cfg.out_dir).unwrap();
    fs::write(cfg.results_path(), "some,other,header\n").unwrap();
    assert!(run_sweep(&cfg, true).is_err());
}

#[test]
fn zero_tolerance_fails_with_margins() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
models = ["er:2"]
n_ladder = [2000]
seeds = 2
k_list = [5]
radii = [2]
census_reps = 5000
[tolerances]
lscc = 0.0
kn = 0.0
"#;
    let report = verify(&config(dir.path(), body)).unwrap();
    assert!(!report.passed());
    let failing: Vec<_> = report.checks.iter().filter(|c| !c.passed()).collect();
    assert!(failing.iter().any(|c| c.name == "giant-fraction"));
    assert!(failing.iter().all(|c| c.margin() < 0.0));
    assert!(report.render().contains("FAIL giant-fraction"));
}

#[test]
fn subcritical_and_critical_branches_pass() {
    let dir = tempfile::tempdir().unwrap();
    let body = "models = [\"er:0.5\", \"er:1\"]\nn_ladder = [20000]\nseeds = 2\n";
    let report = verify(&config(dir.path(), body)).unwrap();
    assert!(report.passed(), "{}", report.render());
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert!(
        names.contains(&"giant-fraction-subcritical") && names.contains(&"giant-fraction-critical")
    );
}

#[test]
fn fixtures_are_skipped_with_notice() {
    let dir = tempfile::tempdir().unwrap();
    let report = verify(&config(
        dir.path(),
        "models = [\"fixture:scc-chain:3:2\"]\nn_ladder = [10]\nseeds = 1\n",
    ))
    .unwrap();
    assert!(report.checks.is_empty());
    assert!(report.render().contains("SKIP fixture:scc-chain:3:2"));
    assert!(report.passed());
}

#[test]
fn invalid_configs_abort_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        "models = [\"er:2\"]\nn_ladder = [2000, 1000]\nseeds = 1\n",
        "models = [\"er:2\"]\nn_ladder = [1000]\nseeds = 0\n",
        "models = [\"er:2\", \"er:2\"]\nn_ladder = [1000]\nseeds = 1\n",
        "models = [\"cm:file:missing.json\"]\nn_ladder = [1000]\nseeds = 1\n",
        "models = [\"er:2\"]\nn_ladder = [1000]\nseeds = 1\nk_list = [0]\n",
        "models = [\"er:2\"]\nn_ladder = [1000]\nseeds = 1\nbogus_key = 1\n",
        "models = [\"er:2\"]\nn_ladder = [1000]\nseeds = 1\n[tolerances]\nlscc = -1.0\n",
    ];
    for body in bad {
        let text = format!("out_dir = \"out\"\n{body}");
        assert!(
            ExperimentConfig::from_toml(&text, dir.path()).is_err(),
            "accepted:\n{body}"
        );
    }
    assert!(!dir.path().join("out").exists());
}
