use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orchestration::StrategyName;
use crate::sim::{RunTrace, StepRecord};

/// Initial variance below which convergence is reported as 0.
pub const VARIANCE_FLOOR: f64 = 1e-9;

pub const METRICS_HEADER: &str = "step,mean_valence,valence_variance,group_class,prevalent_emotion,interventions";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub steps: usize,
    /// Variance of the first and last step records.
    pub initial_variance: f64,
    pub final_variance: f64,
    pub convergence_index: f64,
    pub min_mean_valence: f64,
    pub min_step: u64,
    pub final_mean_valence: f64,
    pub time_to_recovery: Option<u64>,
    pub total_interventions: usize,
    pub interventions_by_strategy: BTreeMap<StrategyName, usize>,
}

/// `1 - var_final / var_initial`, or 0 when the initial variance is negligible.
pub fn convergence_index(var_initial: f64, var_final: f64) -> f64 {
    if var_initial < VARIANCE_FLOOR {
        0.0
    } else {
        1.0 - var_final / var_initial
    }
}

/// First step at or after the (earliest) minimum whose mean valence is
/// non-negative. A series that never dips below zero recovers at its minimum.
pub fn time_to_recovery(means: &[(u64, f64)]) -> Option<u64> {
    let (argmin, _) = means
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &(_, m))| match best {
            Some((_, b)) if b <= m => best,
            _ => Some((i, m)),
        })?;
    means[argmin..].iter().find(|(_, m)| *m >= 0.0).map(|(s, _)| *s)
}

pub fn summarize_steps(steps: &[StepRecord]) -> Result<Summary> {
    let (first, last) = match (steps.first(), steps.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::InvalidArgument("trace has no steps".into())),
    };
    let means: Vec<(u64, f64)> = steps.iter().map(|s| (s.step, s.mean_valence)).collect();
    let (min_step, min_mean_valence) = means
        .iter()
        .copied()
        .fold((first.step, first.mean_valence), |b, x| if x.1 < b.1 { x } else { b });
    let mut by_strategy = BTreeMap::new();
    for p in steps.iter().flat_map(|s| &s.interventions) {
        *by_strategy.entry(p.strategy.name).or_insert(0) += 1;
    }
    Ok(Summary {
        steps: steps.len(),
        initial_variance: first.valence_variance,
        final_variance: last.valence_variance,
        convergence_index: convergence_index(first.valence_variance, last.valence_variance),
        min_mean_valence,
        min_step,
        final_mean_valence: last.mean_valence,
        time_to_recovery: time_to_recovery(&means),
        total_interventions: by_strategy.values().sum(),
        interventions_by_strategy: by_strategy,
    })
}

pub fn metrics_csv(steps: &[StepRecord]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for s in steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.step,
            s.mean_valence,
            s.valence_variance,
            s.group_class,
            s.prevalent_emotion,
            s.interventions.len()
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedFiles {
    pub metrics: PathBuf,
    pub trace: PathBuf,
    pub summary: PathBuf,
    pub policy: PathBuf,
}

/// Writes `metrics.csv`, `trace.jsonl`, `summary.json` and `policy.json` into `out_dir`.
pub fn emit_metrics(trace: &RunTrace, out_dir: impl AsRef<Path>) -> Result<EmittedFiles> {
    let dir = out_dir.as_ref();
    let summary = summarize_steps(&trace.steps)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = EmittedFiles {
        metrics: dir.join("metrics.csv"),
        trace: dir.join("trace.jsonl"),
        summary: dir.join("summary.json"),
        policy: dir.join("policy.json"),
    };
    let write = |p: &Path, body: String| fs::write(p, body).map_err(|e| Error::io(p, e));
    write(&files.metrics, metrics_csv(&trace.steps))?;
    write(&files.trace, trace.to_jsonl())?;
    write(
        &files.summary,
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )?;
    write(
        &files.policy,
        serde_json::to_string_pretty(&trace.policy).expect("policy serializes") + "\n",
    )?;
    Ok(files)
}
