//! Seeded k-means++ with Lloyd iterations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each Lloyd iteration; non-increasing.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeans {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cluster)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Number of distinct points, compared bitwise.
pub fn distinct_count<P: AsRef<[f64]>>(points: &[P]) -> usize {
    let mut seen: Vec<&[f64]> = Vec::new();
    for p in points {
        let p = p.as_ref();
        if !seen.iter().any(|q| q.iter().zip(p).all(|(a, b)| a.to_bits() == b.to_bits())) {
            seen.push(p);
        }
    }
    seen.len()
}

fn validate<P: AsRef<[f64]>>(points: &[P], k: usize) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot cluster an empty point set".into()))?;
    let dim = first.as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::InvalidArgument("points have mixed dimensions".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let distinct = distinct_count(points);
    if k > distinct {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds {distinct} distinct points")));
    }
    Ok(dim)
}

/// k-means++ seeding: first centre uniform, the rest proportional to squared distance.
pub fn kmeans_plus_plus<P: AsRef<[f64]>>(points: &[P], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    validate(points, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].as_ref().to_vec()];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p.as_ref(), &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &d) in nearest.iter().enumerate() {
            if d <= 0.0 {
                continue;
            }
            acc += d;
            chosen = Some(i);
            if acc > target {
                break;
            }
        }
        let chosen = chosen.expect("k <= distinct points leaves positive mass");
        let c = points[chosen].as_ref().to_vec();
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(squared_distance(p.as_ref(), &c));
        }
        centroids.push(c);
    }
    Ok(centroids)
}

/// Full clustering: k-means++ seeding followed by Lloyd iterations.
pub fn kmeans<P: AsRef<[f64]>>(points: &[P], k: usize, seed: u64) -> Result<KMeans> {
    let init = kmeans_plus_plus(points, k, seed)?;
    lloyd(points, init)
}

fn nearest_centroid(p: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(p, &centroids[0]);
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(p, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn inertia<P: AsRef<[f64]>>(points: &[P], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| squared_distance(p.as_ref(), &centroids[c]))
        .sum()
}

/// Lloyd iterations from the given initial centroids.
pub fn lloyd<P: AsRef<[f64]>>(points: &[P], initial: Vec<Vec<f64>>) -> Result<KMeans> {
    let k = initial.len();
    let dim = validate(points, k)?;
    if initial.iter().any(|c| c.len() != dim) {
        return Err(Error::InvalidArgument("initial centroids have the wrong dimension".into()));
    }
    let mut centroids = initial;
    let mut assignment = vec![0usize; points.len()];
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        for (a, p) in assignment.iter_mut().zip(points) {
            *a = nearest_centroid(p.as_ref(), &centroids);
        }
        reseed_empty(points, &mut centroids, &mut assignment);

        // running means keep identical points exact
        let mut means = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            let n = counts[c] as f64;
            for (m, x) in means[c].iter_mut().zip(p.as_ref()) {
                *m += (x - *m) / n;
            }
        }
        let mut movement = 0.0f64;
        for (c, mean) in centroids.iter_mut().zip(means) {
            movement = movement.max(squared_distance(&mean, c).sqrt());
            *c = mean;
        }
        history.push(inertia(points, &centroids, &assignment));
        if movement < CONVERGENCE_TOLERANCE {
            break;
        }
    }

    Ok(KMeans {
        inertia: *history.last().expect("at least one iteration"),
        centroids,
        assignment,
        inertia_history: history,
        iterations,
    })
}

/// Each empty cluster takes the point farthest from its current centroid.
fn reseed_empty<P: AsRef<[f64]>>(points: &[P], centroids: &mut [Vec<f64>], assignment: &mut [usize]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = -1.0;
        for (i, p) in points.iter().enumerate() {
            if counts[assignment[i]] < 2 {
                continue;
            }
            let d = squared_distance(p.as_ref(), &centroids[assignment[i]]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let i = far.expect("an empty cluster implies some cluster has two or more points");
        centroids[empty] = points[i].as_ref().to_vec();
        assignment[i] = empty;
    }
}
