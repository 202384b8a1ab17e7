//! Cross-speaker mood grouping: featurize patterns, cluster them, and pick
//! the prevalent group mood.

mod features;
mod kmeans;
mod prevalent;

pub use features::{featurize_pattern, PatternFeatures, FEATURE_DIM};
pub use kmeans::{
    distinct_count, kmeans, kmeans_plus_plus, lloyd, squared_distance, KMeans, CONVERGENCE_TOLERANCE, MAX_ITERATIONS,
};
pub use prevalent::{detect_prevalent_mood, refine_groups, variance};

use crate::affect::{GroupMoodSnapshot, MoodPattern};
use crate::error::Result;

pub const DEFAULT_K: usize = 3;
pub const DEFAULT_MIN_CLUSTER_WEIGHT: f64 = 0.5;

pub fn cluster_patterns(features: &[PatternFeatures], k: usize, seed: u64) -> Result<KMeans> {
    kmeans(features, k, seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupingParams {
    pub k: usize,
    pub min_cluster_weight: f64,
    pub window_len: usize,
}

/// The whole grouping stage. `k` is capped at the number of distinct
/// feature vectors; no patterns yields `None`.
pub fn group_moods(
    step: u64,
    patterns: &[MoodPattern],
    human_valences: &[f64],
    params: &GroupingParams,
    seed: u64,
) -> Result<Option<GroupMoodSnapshot>> {
    if patterns.is_empty() {
        return Ok(None);
    }
    let features = patterns
        .iter()
        .map(|p| featurize_pattern(p, params.window_len))
        .collect::<Result<Vec<_>>>()?;
    let k = params.k.min(distinct_count(&features)).max(1);
    let clustering = cluster_patterns(&features, k, seed)?;
    let snapshot = detect_prevalent_mood(step, &clustering, patterns, human_valences)?;
    Ok(Some(refine_groups(&snapshot, params.min_cluster_weight)))
}
