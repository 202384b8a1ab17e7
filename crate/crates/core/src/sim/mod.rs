//! Discrete-time simulation of humans and agents sharing a conversation.

mod backchannel;
mod contagion;
mod engine;
mod human;
mod topology;

pub use backchannel::{aggregate_backchannel, HumanReading, MoodDigest, PooledObservations};
pub use contagion::{step_contagion, step_valences, Incoming, DEFAULT_DECAY};
pub use engine::{run_scenario, run_scenario_with, DeliveredUtterance, RewardRecord, RunTrace, StepRecord, UnitSnapshot};
pub use human::{generate_human_message, PhraseBank, SyntheticHuman, PHRASE_MATCH_WINDOW};
pub use topology::{agent_id, deliver_messages, human_id, Delivery, EntityIndex, Topology, TopologyKind};
