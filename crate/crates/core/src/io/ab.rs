use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::TemplateBank;
use crate::sim::run_scenario_with;

use super::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbRow {
    pub seed: u64,
    pub final_mean_off: f64,
    pub final_mean_on: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbReport {
    pub rows: Vec<AbRow>,
    pub mean_delta: f64,
    pub improved: usize,
    pub worsened: usize,
    pub ties: usize,
    /// One-sided sign test over non-tied seeds.
    pub p_value: f64,
}

impl AbReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,final_mean_off,final_mean_on,delta\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.seed, r.final_mean_off, r.final_mean_on, r.delta);
        }
        out
    }
}

/// P(X >= successes) for X ~ Binomial(trials, 1/2).
pub fn sign_test_p(successes: usize, trials: usize) -> f64 {
    if successes == 0 {
        return 1.0;
    }
    if successes > trials {
        return 0.0;
    }
    // ln C(trials, k) built up incrementally
    let mut ln_c = 0.0f64;
    let mut p = 0.0;
    let ln_half_n = trials as f64 * 0.5f64.ln();
    for k in 0..=trials {
        if k > 0 {
            ln_c += ((trials - k + 1) as f64).ln() - (k as f64).ln();
        }
        if k >= successes {
            p += (ln_c + ln_half_n).exp();
        }
    }
    p.min(1.0)
}

/// Runs each of `n_seeds` seeds (base seed + i) with orchestration off and on.
pub fn run_ab(config: &ScenarioConfig, n_seeds: u64) -> Result<AbReport> {
    if n_seeds == 0 {
        return Err(Error::InvalidArgument("ab needs at least one seed".into()));
    }
    config.validate()?;
    let lexicon = config.load_lexicon()?;
    let templates = TemplateBank::builtin();
    let mut rows = (0..n_seeds)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i);
            let mut off = config.clone();
            off.seed = seed;
            off.orchestration.enabled = false;
            let mut on = off.clone();
            on.orchestration.enabled = true;
            let final_off = run_scenario_with(&off, &lexicon, &templates)?.final_mean_valence();
            let final_on = run_scenario_with(&on, &lexicon, &templates)?.final_mean_valence();
            let (final_mean_off, final_mean_on) = (final_off.unwrap_or(0.0), final_on.unwrap_or(0.0));
            Ok(AbRow {
                seed,
                final_mean_off,
                final_mean_on,
                delta: final_mean_on - final_mean_off,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.seed);

    let improved = rows.iter().filter(|r| r.delta > 0.0).count();
    let worsened = rows.iter().filter(|r| r.delta < 0.0).count();
    Ok(AbReport {
        mean_delta: rows.iter().map(|r| r.delta).sum::<f64>() / rows.len() as f64,
        p_value: sign_test_p(improved, improved + worsened),
        ties: rows.len() - improved - worsened,
        improved,
        worsened,
        rows,
    })
}
