//! Contextual epsilon-greedy bandit over intervention strategies.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::affect::GroupMoodSnapshot;
use crate::error::{Error, Result};

use super::strategy::{candidate_strategies, ContextKey, Strategy, StrategyName};

pub const DEFAULT_EPSILON_EXPLORE: f64 = 0.1;
pub const DEFAULT_HORIZON: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ArmStats {
    pub n: u64,
    #[serde(rename = "Q")]
    pub q: f64,
}

/// context -> strategy -> {n, Q}. This is the JSON document written as `policy.json`.
pub type PolicyTable = BTreeMap<ContextKey, BTreeMap<StrategyName, ArmStats>>;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pub epsilon_explore: f64,
    pub horizon: usize,
    /// When false only the decision tree's recommendation is ever used.
    pub optimize: bool,
    pub table: PolicyTable,
}

impl PolicyState {
    pub fn new(epsilon_explore: f64, horizon: usize, optimize: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon_explore) {
            return Err(Error::InvalidArgument(format!("epsilon_explore {epsilon_explore} outside [0,1]")));
        }
        if horizon == 0 {
            return Err(Error::InvalidArgument("reward horizon must be positive".into()));
        }
        Ok(PolicyState {
            epsilon_explore,
            horizon,
            optimize,
            table: PolicyTable::new(),
        })
    }

    pub fn arm(&self, context: ContextKey, strategy: StrategyName) -> ArmStats {
        self.table
            .get(&context)
            .and_then(|m| m.get(&strategy))
            .copied()
            .unwrap_or_default()
    }

    pub fn value(&self, context: ContextKey, strategy: StrategyName) -> f64 {
        self.arm(context, strategy).q
    }

    /// Incremental-mean update of one arm; every other entry is untouched.
    pub fn update(&mut self, context: ContextKey, strategy: StrategyName, reward: f64) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::InvalidArgument(format!("reward {reward} is not finite")));
        }
        let arm = self.table.entry(context).or_default().entry(strategy).or_default();
        arm.n += 1;
        arm.q += (reward - arm.q) / arm.n as f64;
        Ok(())
    }

    /// Epsilon-greedy choice among `candidates`; argmax ties go to the earlier candidate.
    pub fn choose<R: Rng + ?Sized>(&self, context: ContextKey, candidates: &[StrategyName], rng: &mut R) -> StrategyName {
        assert!(!candidates.is_empty(), "decision tree always yields a candidate");
        if candidates.len() == 1 {
            return candidates[0];
        }
        if rng.random::<f64>() < self.epsilon_explore {
            return candidates[rng.random_range(0..candidates.len())];
        }
        let mut best = candidates[0];
        let mut best_q = self.value(context, best);
        for &c in &candidates[1..] {
            let q = self.value(context, c);
            if q > best_q {
                best = c;
                best_q = q;
            }
        }
        best
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.table).expect("policy table serializes")
    }

    pub fn load_table(&mut self, json: &str) -> Result<()> {
        self.table = serde_json::from_str(json).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Ok(())
    }
}

/// Functional form of [`PolicyState::update`].
pub fn update_policy(mut policy: PolicyState, context: ContextKey, strategy: StrategyName, reward: f64) -> Result<PolicyState> {
    policy.update(context, strategy, reward)?;
    Ok(policy)
}

/// Walks the decision tree for `snapshot` and picks among its candidates.
pub fn select_strategy<R: Rng + ?Sized>(
    snapshot: &GroupMoodSnapshot,
    policy: &PolicyState,
    divergence_threshold: f64,
    rng: &mut R,
) -> Strategy {
    let context = ContextKey::of(snapshot);
    let mut candidates = candidate_strategies(
        snapshot.group_class,
        snapshot.dominant_emotion,
        snapshot.divergence,
        divergence_threshold,
    );
    if !policy.optimize {
        candidates.truncate(1);
    }
    policy.choose(context, &candidates, rng).strategy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::{Band, Cluster, Emotion};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> ContextKey {
        ContextKey {
            group_class: Band::Negative,
            dominant_emotion: Emotion::Anger,
        }
    }

    fn snapshot(group_class: Band, dominant_emotion: Emotion, divergence: f64) -> GroupMoodSnapshot {
        GroupMoodSnapshot {
            step: 0,
            clusters: vec![Cluster {
                centroid: vec![0.0; 7],
                members: vec![0],
                weight: 1.0,
            }],
            prevalent_cluster_id: 0,
            group_class,
            divergence,
            dominant_emotion,
        }
    }

    #[test]
    fn incremental_mean_examples() {
        let p = PolicyState::new(0.1, 3, true).unwrap();
        let p = update_policy(p, ctx(), StrategyName::Uplift, 0.5).unwrap();
        assert_eq!(p.arm(ctx(), StrategyName::Uplift), ArmStats { n: 1, q: 0.5 });
        let p = update_policy(p, ctx(), StrategyName::Uplift, 0.1).unwrap();
        let arm = p.arm(ctx(), StrategyName::Uplift);
        assert_eq!(arm.n, 2);
        assert!((arm.q - 0.3).abs() < 1e-15);
        let p = update_policy(p, ctx(), StrategyName::Uplift, arm.q).unwrap();
        assert_eq!(p.value(ctx(), StrategyName::Uplift), arm.q);
        assert_eq!(p.arm(ctx(), StrategyName::Mirror), ArmStats::default());
    }

    #[test]
    fn non_finite_reward_rejected() {
        let mut p = PolicyState::new(0.1, 3, true).unwrap();
        assert!(p.update(ctx(), StrategyName::Uplift, f64::NAN).is_err());
    }

    #[test]
    fn select_examples_without_exploration() {
        let p = PolicyState::new(0.0, 3, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = select_strategy(&snapshot(Band::Negative, Emotion::Anger, 0.3), &p, 0.15, &mut rng);
        assert_eq!(s.name, StrategyName::DeEscalate);
        let s = select_strategy(&snapshot(Band::Positive, Emotion::Joy, 0.0), &p, 0.15, &mut rng);
        assert_eq!(s.name, StrategyName::Mirror);
        let s = select_strategy(&snapshot(Band::Negative, Emotion::Sadness, 0.05), &p, 0.15, &mut rng);
        assert_eq!(s.name, StrategyName::EmpathizeUplift);
    }

    #[test]
    fn tree_only_ignores_values() {
        let mut p = PolicyState::new(1.0, 3, false).unwrap();
        p.update(ctx(), StrategyName::Uplift, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = select_strategy(&snapshot(Band::Negative, Emotion::Anger, 0.3), &p, 0.15, &mut rng);
            assert_eq!(s.name, StrategyName::DeEscalate);
        }
    }

    #[test]
    fn exploits_best_value() {
        let mut p = PolicyState::new(0.0, 3, true).unwrap();
        p.update(ctx(), StrategyName::Reassure, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = select_strategy(&snapshot(Band::Negative, Emotion::Anger, 0.3), &p, 0.15, &mut rng);
        assert_eq!(s.name, StrategyName::Reassure);
    }

    #[test]
    fn json_round_trip() {
        let mut p = PolicyState::new(0.1, 3, true).unwrap();
        p.update(ctx(), StrategyName::Uplift, 0.25).unwrap();
        let json = p.to_json();
        assert!(json.contains("\"negative/anger\""));
        assert!(json.contains("\"uplift\""));
        let mut q = PolicyState::new(0.1, 3, true).unwrap();
        q.load_table(&json).unwrap();
        assert_eq!(p, q);
    }
}
