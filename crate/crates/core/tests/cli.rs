use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contagion"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn run_writes_outputs_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(shipped("dyadic.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["steps"], 50);
    for f in ["metrics.csv", "trace.jsonl", "summary.json", "policy.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn run_overrides_seed_and_orchestration() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--seed", "99", "--no-orchestration", "--out"])
        .arg(dir.path())
        .arg(shipped("coordinated.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["total_interventions"], 0);
}

#[test]
fn analyze_prints_golden_report() {
    let out = bin().arg("analyze").arg(shipped("team_chat.jsonl")).output().unwrap();
    assert!(out.status.success());
    let golden = std::fs::read_to_string(shipped("team_chat.report.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn analyze_with_custom_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("tiny.lexicon");
    std::fs::write(&lex, "# tiny\nlove\tval\t0.8\nhate\tval\t-0.8\n").unwrap();
    let report = dir.path().join("report.json");
    let out = bin()
        .arg("analyze")
        .arg(shipped("team_chat.jsonl"))
        .arg("--lexicon")
        .arg(&lex)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["utterances"], 40);
}

#[test]
fn ab_emits_per_seed_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("ab")
        .arg(shipped("spiral.json"))
        .args(["--seeds", "4", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "seed,final_mean_off,final_mean_on,delta");
    let seeds: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seeds, vec!["1", "2", "3", "4"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("improved="));
    assert!(dir.path().join("ab.json").is_file());
}

#[test]
fn bad_config_exits_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"topology": "HAM-observer", "n_humans": 2, "n_agents": 1, "steps": 5, "seed": 1, "foo": 1}"#).unwrap();
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));

    let out = bin().arg("run").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
