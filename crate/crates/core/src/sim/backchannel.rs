use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::affect::{argmax_first, compare_ids, Band, Emotion, MoodPattern};
use crate::error::{Error, Result};

/// Latest smoothed valence an agent holds for one human.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanReading {
    pub human_id: String,
    pub ewma_valence: f64,
    /// Whether the observing agent is privately paired with this human.
    pub paired: bool,
}

/// Per-agent summary shared over the backchannel. Carries no message text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoodDigest {
    pub agent_id: String,
    pub step: u64,
    pub band: Band,
    pub dominant_emotion: Emotion,
    pub observed: Vec<String>,
    pub mean_ewma_valence: f64,
    pub readings: Vec<HumanReading>,
    pub patterns: Vec<MoodPattern>,
}

impl MoodDigest {
    pub fn new(agent_id: String, step: u64, mut readings: Vec<HumanReading>, patterns: Vec<MoodPattern>) -> Self {
        readings.sort_by(|a, b| compare_ids(&a.human_id, &b.human_id));
        let mean = if readings.is_empty() {
            0.0
        } else {
            readings.iter().map(|r| r.ewma_valence).sum::<f64>() / readings.len() as f64
        };
        let mut by_emotion = [0.0; 5];
        for p in &patterns {
            by_emotion[p.dominant_emotion.index()] += p.weight();
        }
        let dominant_emotion = if by_emotion.iter().all(|&w| w <= 0.0) {
            Emotion::Neutral
        } else {
            Emotion::ALL[argmax_first(&by_emotion)]
        };
        MoodDigest {
            agent_id,
            step,
            band: Band::of(mean),
            dominant_emotion,
            observed: readings.iter().map(|r| r.human_id.clone()).collect(),
            mean_ewma_valence: mean,
            readings,
            patterns,
        }
    }
}

/// Deduplicated observations ready for grouping.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PooledObservations {
    /// One reading per human, natural id order.
    pub readings: Vec<HumanReading>,
    /// Patterns of each human, taken from the agent whose reading won.
    pub patterns: Vec<MoodPattern>,
}

impl PooledObservations {
    pub fn valences(&self) -> Vec<f64> {
        self.readings.iter().map(|r| r.ewma_valence).collect()
    }

    pub fn mean_valence(&self) -> Option<f64> {
        (!self.readings.is_empty())
            .then(|| self.readings.iter().map(|r| r.ewma_valence).sum::<f64>() / self.readings.len() as f64)
    }
}

/// Pools digests. For a human seen by several agents the privately paired
/// agent wins, then the lowest agent id.
pub fn aggregate_backchannel(digests: &[MoodDigest]) -> Result<PooledObservations> {
    let mut seen = BTreeSet::new();
    for d in digests {
        if !seen.insert(d.agent_id.as_str()) {
            return Err(Error::ProtocolViolation(format!(
                "agent {} sent more than one digest at step {}",
                d.agent_id, d.step
            )));
        }
    }
    let mut order: Vec<&MoodDigest> = digests.iter().collect();
    order.sort_by(|a, b| compare_ids(&a.agent_id, &b.agent_id));

    let mut winner: BTreeMap<&str, (&MoodDigest, &HumanReading)> = BTreeMap::new();
    for d in &order {
        for r in &d.readings {
            match winner.get(r.human_id.as_str()) {
                Some((_, held)) if held.paired || !r.paired => {}
                _ => {
                    winner.insert(&r.human_id, (d, r));
                }
            }
        }
    }
    let mut chosen: Vec<(&MoodDigest, &HumanReading)> = winner.into_values().collect();
    chosen.sort_by(|a, b| compare_ids(&a.1.human_id, &b.1.human_id));

    let mut pool = PooledObservations::default();
    for (d, r) in chosen {
        pool.readings.push(r.clone());
        pool.patterns
            .extend(d.patterns.iter().filter(|p| p.speaker_id == r.human_id).cloned());
    }
    Ok(pool)
}
