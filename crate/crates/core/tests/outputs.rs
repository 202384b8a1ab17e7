use std::path::{Path, PathBuf};

use contagion_core::io::{emit_metrics, ingest_transcript, parse_scenario, parse_scenario_str, METRICS_HEADER};
use contagion_core::observation::Lexicon;
use contagion_core::sim::run_scenario;
use contagion_core::Error;
use serde_json::Value;

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

const SCENARIOS: [&str; 6] = [
    "spiral.json",
    "coordinated.json",
    "dyadic.json",
    "isolated.json",
    "backchannel.json",
    "observer.json",
];

fn population_variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Summary fields rebuilt from the raw trace lines alone.
fn recompute_summary(trace_jsonl: &str) -> Value {
    let steps: Vec<Value> = trace_jsonl.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let means: Vec<(u64, f64)> = steps
        .iter()
        .map(|s| {
            let q: Vec<f64> = s["valences"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
            (s["step"].as_u64().unwrap(), q.iter().sum::<f64>() / q.len() as f64)
        })
        .collect();
    let var = |s: &Value| {
        let q: Vec<f64> = s["valences"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        population_variance(&q)
    };
    let (v0, v1) = (var(&steps[0]), var(steps.last().unwrap()));
    let ci = if v0 < 1e-9 { 0.0 } else { 1.0 - v1 / v0 };
    let mut min_i = 0;
    for (i, m) in means.iter().enumerate() {
        if m.1 < means[min_i].1 {
            min_i = i;
        }
    }
    let ttr = means[min_i..].iter().find(|m| m.1 >= 0.0).map(|m| m.0);
    let total: usize = steps.iter().map(|s| s["interventions"].as_array().unwrap().len()).sum();
    serde_json::json!({
        "convergence_index": ci,
        "time_to_recovery": ttr,
        "total_interventions": total,
        "final_mean_valence": means.last().unwrap().1,
    })
}

#[test]
fn emitted_files_are_consistent() {
    for name in SCENARIOS {
        let config = parse_scenario(shipped(name)).unwrap();
        let trace = run_scenario(&config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_metrics(&trace, dir.path().join("nested/out")).unwrap();

        let csv = std::fs::read_to_string(&files.metrics).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(METRICS_HEADER));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len() as u64, config.steps, "{name}");
        for row in rows {
            let cols: Vec<&str> = row.split(',').collect();
            assert_eq!(cols.len(), 6);
            assert!(["positive", "negative", "neutral"].contains(&cols[3]), "{row}");
        }

        let jsonl = std::fs::read_to_string(&files.trace).unwrap();
        assert_eq!(jsonl.lines().count() as u64, config.steps);
        let summary: Value = serde_json::from_str(&std::fs::read_to_string(&files.summary).unwrap()).unwrap();
        let oracle = recompute_summary(&jsonl);
        for key in ["convergence_index", "final_mean_valence"] {
            let (a, b) = (summary[key].as_f64().unwrap(), oracle[key].as_f64().unwrap());
            assert!((a - b).abs() < 1e-9, "{name} {key}: {a} vs {b}");
        }
        assert_eq!(summary["time_to_recovery"], oracle["time_to_recovery"], "{name}");
        assert_eq!(summary["total_interventions"], oracle["total_interventions"], "{name}");
        let by: u64 = summary["interventions_by_strategy"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .sum();
        assert_eq!(by, summary["total_interventions"].as_u64().unwrap());

        let policy: Value = serde_json::from_str(&std::fs::read_to_string(&files.policy).unwrap()).unwrap();
        assert!(policy.is_object());
    }
}

#[test]
fn unwritable_output_is_io_error() {
    let trace = run_scenario(&parse_scenario(shipped("dyadic.json")).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    assert!(matches!(emit_metrics(&trace, blocker.join("out")), Err(Error::Io { .. })));
}

#[test]
fn shipped_scenarios_round_trip() {
    for name in SCENARIOS {
        let config = parse_scenario(shipped(name)).unwrap();
        let again = parse_scenario_str(&config.to_json(), Path::new("/")).unwrap();
        assert_eq!(config, again, "{name}");
    }
}

#[test]
fn missing_scenario_is_io_error() {
    assert!(matches!(parse_scenario(shipped("nope.json")), Err(Error::Io { .. })));
}

#[test]
fn transcript_matches_golden_report() {
    let report = ingest_transcript(shipped("team_chat.jsonl"), &Lexicon::builtin()).unwrap();
    let golden = std::fs::read_to_string(shipped("team_chat.report.json")).unwrap();
    assert_eq!(report.to_json(), golden);
}

#[test]
fn empty_and_malformed_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let report = ingest_transcript(&empty, &Lexicon::builtin()).unwrap();
    assert_eq!(report.utterances, 0);
    assert!(report.speakers.is_empty() && report.snapshot.is_none());

    let bad = dir.path().join("bad.jsonl");
    let good = std::fs::read_to_string(shipped("team_chat.jsonl")).unwrap();
    let mut lines: Vec<&str> = good.lines().take(4).collect();
    lines.insert(2, r#"{"t": 1, "speaker_id": "h0"}"#);
    std::fs::write(&bad, lines.join("\n")).unwrap();
    match ingest_transcript(&bad, &Lexicon::builtin()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}
