use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::affect::compare_ids;

use super::strategy::{ContextKey, Strategy};

pub const DEFAULT_COOLDOWN: u64 = 3;
pub const DEFAULT_BUDGET: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterventionPlan {
    pub step_scheduled: u64,
    pub agent_id: String,
    pub target_human_id: String,
    pub strategy: Strategy,
    pub context_key: ContextKey,
}

/// Last step each human was targeted. A human targeted at step `s` is
/// ineligible through step `s + cooldown - 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cooldowns {
    window: u64,
    last_targeted: BTreeMap<String, u64>,
}

impl Cooldowns {
    pub fn new(window: u64) -> Self {
        Cooldowns {
            window,
            last_targeted: BTreeMap::new(),
        }
    }

    pub fn is_cooling(&self, human: &str, step: u64) -> bool {
        self.last_targeted
            .get(human)
            .is_some_and(|&last| step < last + self.window)
    }

    pub fn record(&mut self, plans: &[InterventionPlan]) {
        for p in plans {
            self.last_targeted.insert(p.target_human_id.clone(), p.step_scheduled);
        }
    }
}

/// Assigns agents to the most negative eligible humans.
///
/// Targets are sorted ascending by smoothed valence (ties by id). Agents are
/// taken round-robin in ascending id order, skipping any that cannot reach the
/// target or have used their per-step budget.
#[allow(clippy::too_many_arguments)]
pub fn allocate_agents(
    step: u64,
    strategy: Strategy,
    context_key: ContextKey,
    humans: &[(String, f64)],
    agents: &[String],
    cooldowns: &Cooldowns,
    budget_per_agent: usize,
    can_reach: impl Fn(&str, &str) -> bool,
) -> Vec<InterventionPlan> {
    let mut targets: Vec<&(String, f64)> = humans.iter().filter(|(id, _)| !cooldowns.is_cooling(id, step)).collect();
    targets.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| compare_ids(&a.0, &b.0)));

    let mut roster: Vec<&String> = agents.iter().collect();
    roster.sort_by(|a, b| compare_ids(a, b));
    let mut used = vec![0usize; roster.len()];
    let mut cursor = 0;
    let mut plans = Vec::new();

    for (human, _) in targets {
        let pick = (0..roster.len())
            .map(|off| (cursor + off) % roster.len())
            .find(|&i| used[i] < budget_per_agent && can_reach(roster[i], human));
        let Some(i) = pick else {
            continue;
        };
        used[i] += 1;
        cursor = (i + 1) % roster.len();
        plans.push(InterventionPlan {
            step_scheduled: step,
            agent_id: roster[i].clone(),
            target_human_id: human.clone(),
            strategy,
            context_key,
        });
    }
    plans
}
