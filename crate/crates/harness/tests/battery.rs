use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use mallows_harness::{run_all, run_experiment, BatteryConfig, HarnessError, Summary, NAMES};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mallows-match"))
}

#[test]
fn shipped_configs_cover_every_experiment() {
    for file in ["battery.toml", "smoke.toml"] {
        let cfg = BatteryConfig::load(&config_path(file)).unwrap();
        assert!(cfg.seed.is_some(), "{file}");
        for name in NAMES {
            assert!(cfg.experiments.iter().any(|e| e.name == *name), "{file} misses {name}");
        }
    }
}

#[test]
fn smoke_battery_is_quick_and_complete() {
    let cfg = BatteryConfig::load(&config_path("smoke.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let summary = run_all(&cfg, 7, dir.path()).unwrap();
    assert!(start.elapsed() < Duration::from_secs(60));
    assert_eq!(summary.experiments.len(), cfg.experiments.len());
    assert_eq!(summary.pass, summary.experiments.iter().all(|e| e.pass));
    for e in &summary.experiments {
        assert!(e.error.is_none(), "{}: {:?}", e.name, e.error);
        assert!(dir.path().join(format!("{}.json", e.file)).exists());
        assert!(dir.path().join(format!("{}.csv", e.file)).exists());
    }
    let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let back: Summary = serde_json::from_str(&text).unwrap();
    let key = |s: &Summary| s.experiments.iter().map(|e| (e.file.clone(), e.pass, e.trials)).collect::<Vec<_>>();
    assert_eq!(key(&back), key(&summary));
    assert!(!text.contains("wall"));
}

#[test]
fn repeated_names_get_distinct_files() {
    let cfg = BatteryConfig::parse(
        "seed = 1\n[[experiment]]\nname = \"oracle-rate\"\npairs = 1000\n[[experiment]]\nname = \"oracle-rate\"\npairs = 2000\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let s = run_all(&cfg, 1, dir.path()).unwrap();
    let files: Vec<&str> = s.experiments.iter().map(|e| e.file.as_str()).collect();
    assert_eq!(files, ["oracle-rate", "oracle-rate-2"]);
    assert_eq!(s.experiments[1].trials, 2000);
}

#[test]
fn reports_depend_only_on_params_and_seed() {
    let params: toml::Table = toml::from_str("trials = 2000").unwrap();
    let json = |seed| serde_json::to_string(&run_experiment("perfect-prob", &params, seed).unwrap().report).unwrap();
    assert_eq!(json(3), json(3));
    assert_ne!(json(3), json(4));
}

#[test]
fn unknown_experiment_is_an_error() {
    let err = run_experiment("no-such-thing", &toml::Table::new(), 0).unwrap_err();
    assert!(matches!(err, HarnessError::UnknownExperiment(_)));
}

#[test]
fn cli_lists_experiments() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), NAMES);
}

#[test]
fn cli_rejects_bad_config_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "seed = 1\n\n[[experiment]]\nname = \"perfect-prob\"\ntrials = 0\n").unwrap();
    let out = bin().args(["run-all", "--config"]).arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn cli_run_all_exit_status_follows_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ok.toml");
    std::fs::write(&path, "seed = 5\n[[experiment]]\nname = \"oracle-rate\"\npairs = 10000\n").unwrap();
    let out = bin().args(["run-all", "--config"]).arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("summary.json").exists());

    let failing = dir.path().join("fail.toml");
    std::fs::write(&failing, "seed = 5\n[[experiment]]\nname = \"tame-sharpness\"\nseeds = 2\n").unwrap();
    let out = bin().args(["run-all", "--config"]).arg(&failing).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_sampled_matching_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sample", "finite", "--window", "-6:6", "--p", "0.4", "--seed", "9"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let path = dir.path().join("m.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = bin()
        .args(["verify", "--p", "0.4", "--seed", "9", "--matching"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let blocking: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(blocking, serde_json::json!([]));
}

#[test]
fn cli_chain_prints_csv() {
    let out = bin().args(["chain", "--steps", "50", "--backend", "dist"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,unmatched,cut"));
    assert_eq!(lines.count(), 50);
}
