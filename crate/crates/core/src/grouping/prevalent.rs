use crate::affect::{argmax_first, Band, Cluster, Emotion, GroupMoodSnapshot, MoodPattern};
use crate::error::{Error, Result};

use super::kmeans::{squared_distance, KMeans};

/// Population variance; zero for an empty slice.
pub fn variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Builds the group snapshot from a clustering of `patterns`.
///
/// `human_valences` are the latest smoothed valences of every observed
/// human; their variance is the snapshot's divergence.
pub fn detect_prevalent_mood(
    step: u64,
    clustering: &KMeans,
    patterns: &[MoodPattern],
    human_valences: &[f64],
) -> Result<GroupMoodSnapshot> {
    if clustering.k() == 0 {
        return Err(Error::InvalidArgument("no clusters".into()));
    }
    if clustering.assignment.len() != patterns.len() {
        return Err(Error::InvalidArgument(format!(
            "clustering covers {} points but {} patterns were given",
            clustering.assignment.len(),
            patterns.len()
        )));
    }
    let clusters = (0..clustering.k())
        .map(|j| {
            let members = clustering.members(j);
            let weight = members.iter().map(|&i| patterns[i].weight()).sum();
            Cluster {
                centroid: clustering.centroids[j].clone(),
                members,
                weight,
            }
        })
        .collect();
    snapshot_from_clusters(step, clusters, variance(human_valences))
}

fn snapshot_from_clusters(step: u64, clusters: Vec<Cluster>, divergence: f64) -> Result<GroupMoodSnapshot> {
    let mut prevalent: Option<usize> = None;
    for (j, c) in clusters.iter().enumerate() {
        if c.members.is_empty() {
            continue;
        }
        match prevalent {
            Some(p) if clusters[p].weight >= c.weight => {}
            _ => prevalent = Some(j),
        }
    }
    let prevalent = prevalent.ok_or_else(|| Error::InvalidArgument("no nonempty clusters".into()))?;
    let centroid = &clusters[prevalent].centroid;
    let fractions = &centroid[3..7];
    let dominant_emotion = if fractions.iter().all(|&f| f <= 0.0) {
        Emotion::Neutral
    } else {
        Emotion::AFFECTIVE[argmax_first(fractions)]
    };
    Ok(GroupMoodSnapshot {
        step,
        group_class: Band::of(centroid[0]),
        dominant_emotion,
        prevalent_cluster_id: prevalent,
        divergence,
        clusters,
    })
}

/// Merges clusters lighter than `min_cluster_weight` into their nearest surviving neighbour.
pub fn refine_groups(snapshot: &GroupMoodSnapshot, min_cluster_weight: f64) -> GroupMoodSnapshot {
    let (survivors, dust): (Vec<usize>, Vec<usize>) =
        (0..snapshot.clusters.len()).partition(|&j| snapshot.clusters[j].weight >= min_cluster_weight);
    if survivors.is_empty() || dust.is_empty() {
        return snapshot.clone();
    }
    let mut merged: Vec<Cluster> = survivors.iter().map(|&j| snapshot.clusters[j].clone()).collect();
    for &d in &dust {
        let src = &snapshot.clusters[d];
        if src.members.is_empty() {
            continue;
        }
        // nearest by the survivors' original centroids; ties to the lower index
        let mut target = 0;
        let mut best = f64::INFINITY;
        for (t, &j) in survivors.iter().enumerate() {
            let dist = squared_distance(&src.centroid, &snapshot.clusters[j].centroid);
            if dist < best {
                best = dist;
                target = t;
            }
        }
        let dst = &mut merged[target];
        let (na, nb) = (dst.members.len() as f64, src.members.len() as f64);
        for (c, s) in dst.centroid.iter_mut().zip(&src.centroid) {
            *c = (*c * na + s * nb) / (na + nb);
        }
        dst.members.extend(&src.members);
        dst.members.sort_unstable();
        dst.weight += src.weight;
    }
    snapshot_from_clusters(snapshot.step, merged, snapshot.divergence)
        .expect("survivors keep every member, so at least one cluster is nonempty")
}
