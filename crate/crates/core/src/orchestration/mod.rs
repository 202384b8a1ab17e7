//! Strategy selection, agent allocation, outcome feedback and online policy tuning.

mod allocation;
mod policy;
mod reward;
mod strategy;

pub use allocation::{allocate_agents, Cooldowns, InterventionPlan, DEFAULT_BUDGET, DEFAULT_COOLDOWN};
pub use policy::{
    select_strategy, update_policy, ArmStats, PolicyState, PolicyTable, DEFAULT_EPSILON_EXPLORE, DEFAULT_HORIZON,
};
pub use reward::compute_reward;
pub use strategy::{candidate_strategies, ContextKey, Strategy, StrategyName, DEFAULT_DIVERGENCE_THRESHOLD};
