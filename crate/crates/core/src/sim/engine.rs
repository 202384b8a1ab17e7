use std::collections::{BTreeMap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affect::{Band, Channel, Emotion, EmotionVector, GroupMoodSnapshot, MoodSample, SpeakerKind, Utterance};
use crate::error::{Error, Result};
use crate::grouping::{group_moods, variance, GroupingParams};
use crate::io::ScenarioConfig;
use crate::observation::{refine_classification, segment_patterns, sense_text, Ewma, Lexicon};
use crate::orchestration::{
    allocate_agents, compute_reward, select_strategy, ContextKey, Cooldowns, InterventionPlan, PolicyState, PolicyTable,
    StrategyName,
};
use crate::response::{call_external_generator, render_response, GenerationRequest, Generated, TemplateBank};

use super::backchannel::{aggregate_backchannel, HumanReading, MoodDigest, PooledObservations};
use super::contagion::{step_contagion, Incoming};
use super::human::{generate_human_message, PhraseBank, SyntheticHuman};
use super::topology::{agent_id, deliver_messages, human_id, Topology};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveredUtterance {
    pub utterance: Utterance,
    pub receivers: Vec<String>,
    /// Valence fed to the contagion update; absent for backchannel traffic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expressed_valence: Option<f64>,
}

/// What one orchestrator saw at a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSnapshot {
    pub unit: String,
    /// Mean pooled smoothed valence; `None` before anyone has been heard.
    pub observed_mean: Option<f64>,
    pub snapshot: Option<GroupMoodSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    pub unit: String,
    pub context: ContextKey,
    pub strategy: StrategyName,
    pub decided_at: u64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    /// Human valences after this step's contagion update.
    pub valences: Vec<f64>,
    pub mean_valence: f64,
    pub valence_variance: f64,
    pub group_class: Band,
    pub prevalent_emotion: Emotion,
    pub utterances: Vec<DeliveredUtterance>,
    pub snapshots: Vec<UnitSnapshot>,
    pub interventions: Vec<InterventionPlan>,
    pub rewards: Vec<RewardRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub initial_valences: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub policy: PolicyTable,
}

impl RunTrace {
    /// One step record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("step record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn final_mean_valence(&self) -> Option<f64> {
        self.steps.last().map(|s| s.mean_valence)
    }

    pub fn total_interventions(&self) -> usize {
        self.steps.iter().map(|s| s.interventions.len()).sum()
    }
}

const STREAM_INIT: u64 = 0;
const STREAM_SPEECH: u64 = 1;
const STREAM_POLICY: u64 = 2;
const STREAM_RENDER: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn clustering_seed(seed: u64, step: u64, unit: usize) -> u64 {
    seed ^ (step + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (unit as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

/// What one agent has heard, per human index.
#[derive(Debug, Default)]
struct AgentMemory {
    ewma: BTreeMap<usize, Ewma>,
    samples: BTreeMap<usize, VecDeque<MoodSample>>,
    heard: BTreeMap<usize, VecDeque<Utterance>>,
}

impl AgentMemory {
    fn observe(&mut self, human: usize, u: &Utterance, emotion: &EmotionVector, alpha: f64, window: usize) {
        let ewma = self.ewma.entry(human).or_insert_with(|| Ewma::new(alpha)).update(emotion.valence);
        let samples = self.samples.entry(human).or_default();
        samples.push_back(MoodSample {
            step: u.step,
            speaker_id: u.speaker_id.clone(),
            emotion: *emotion,
            ewma_valence: ewma,
        });
        let heard = self.heard.entry(human).or_default();
        heard.push_back(u.clone());
        if samples.len() > window {
            samples.pop_front();
            heard.pop_front();
        }
    }

    fn digest(&self, agent: usize, step: u64, topology: &Topology, config: &ScenarioConfig) -> Result<MoodDigest> {
        let mut readings = Vec::new();
        let mut patterns = Vec::new();
        for (&h, tracker) in &self.ewma {
            let Some(v) = tracker.value() else { continue };
            readings.push(HumanReading {
                human_id: human_id(h),
                ewma_valence: v,
                paired: topology.paired_human(agent) == Some(h),
            });
            let samples: Vec<MoodSample> = self.samples[&h].iter().cloned().collect();
            let heard: Vec<Utterance> = self.heard[&h].iter().cloned().collect();
            for p in segment_patterns(&samples, config.sensing.ewma_alpha, config.sensing.min_pattern_len)? {
                patterns.push(refine_classification(&p, &heard));
            }
        }
        Ok(MoodDigest::new(agent_id(agent), step, readings, patterns))
    }

    fn last_text(&self, human: usize) -> String {
        self.heard
            .get(&human)
            .and_then(|h| h.back())
            .map(|u| u.text.clone())
            .unwrap_or_default()
    }
}

struct Unit {
    name: String,
    agents: Vec<usize>,
    history: Vec<f64>,
}

struct Pending {
    unit: usize,
    decided_at: usize,
    context: ContextKey,
    strategy: StrategyName,
}

/// Runs a scenario with the lexicon it names (or the built-in one).
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunTrace> {
    config.validate()?;
    let lexicon = config.load_lexicon()?;
    run_scenario_with(config, &lexicon, &TemplateBank::builtin())
}

pub fn run_scenario_with(config: &ScenarioConfig, lexicon: &Lexicon, templates: &TemplateBank) -> Result<RunTrace> {
    config.validate()?;
    let (nh, na) = (config.n_humans, config.n_agents);
    let topology = Topology::new(
        config.topology,
        nh,
        na,
        config.contagion.openness.expand(config.entity_count()),
    )
    .map_err(|e| Error::config("contagion.openness", e.to_string()))?;
    let bank = PhraseBank::builtin(lexicon);

    let initial = config.initial_valences.sample(nh, &mut stream(config.seed, STREAM_INIT));
    let eps = config.contagion.expressiveness.expand(nh);
    let sus = config.contagion.susceptibility.expand(nh);
    let p_speak = config.p_speak.expand(nh);
    let mut humans: Vec<SyntheticHuman> = (0..nh)
        .map(|i| SyntheticHuman {
            id: human_id(i),
            valence: initial[i],
            temperament: config.temperament(i),
            susceptibility: sus[i],
            expressiveness: eps[i],
            p_speak: p_speak[i],
        })
        .collect();

    let mut speech_rng = stream(config.seed, STREAM_SPEECH);
    let mut policy_rng = stream(config.seed, STREAM_POLICY);
    let mut render_rng = stream(config.seed, STREAM_RENDER);

    let orch = &config.orchestration;
    let mut policy = PolicyState::new(orch.epsilon_explore, orch.horizon, orch.optimizer)?;
    let mut cooldowns = Cooldowns::new(orch.cooldown);
    let mut pending: Vec<Pending> = Vec::new();
    let mut units: Vec<Unit> = if config.topology.has_backchannel() {
        vec![Unit {
            name: "central".into(),
            agents: (0..na).collect(),
            history: Vec::new(),
        }]
    } else {
        (0..na)
            .map(|j| Unit {
                name: agent_id(j),
                agents: vec![j],
                history: Vec::new(),
            })
            .collect()
    };
    let grouping = GroupingParams {
        k: config.clustering.k,
        min_cluster_weight: config.clustering.min_cluster_weight,
        window_len: config.sensing.window,
    };
    let mut memories: Vec<AgentMemory> = (0..na).map(|_| AgentMemory::default()).collect();
    let exact = config.contagion.exact_expression;
    let mut steps = Vec::with_capacity(config.steps as usize);

    for t in 0..config.steps {
        let mut log: Vec<DeliveredUtterance> = Vec::new();
        // (sender entity, expressed valence, sender expressiveness, receivers)
        let mut influence: Vec<(usize, f64, f64, Vec<usize>)> = Vec::new();

        let said: Vec<Utterance> = humans
            .iter()
            .filter_map(|h| generate_human_message(h, t, topology.human_channel(), &bank, &mut speech_rng))
            .collect();
        let delivery = deliver_messages(&topology, &said)?;
        for (u, receivers) in said.iter().zip(&delivery.receivers) {
            let sender = topology.parse_entity(&u.speaker_id, SpeakerKind::Human)?;
            let emotion = sense_text(&u.text, lexicon);
            for &r in receivers.iter().filter(|&&r| topology.is_agent(r)) {
                memories[r - nh].observe(sender, u, &emotion, config.sensing.ewma_alpha, config.sensing.window);
            }
            let expressed = if exact { humans[sender].valence } else { emotion.valence };
            influence.push((sender, expressed, humans[sender].expressiveness, receivers.clone()));
            log.push(DeliveredUtterance {
                utterance: u.clone(),
                receivers: receivers.iter().map(|&r| topology.entity_id(r)).collect(),
                expressed_valence: Some(expressed),
            });
        }

        let digests = memories
            .iter()
            .enumerate()
            .map(|(j, m)| m.digest(j, t, &topology, config))
            .collect::<Result<Vec<_>>>()?;
        let pools: Vec<PooledObservations> = if config.topology.has_backchannel() {
            let wire: Vec<Utterance> = digests
                .iter()
                .map(|d| Utterance {
                    step: t,
                    speaker_id: d.agent_id.clone(),
                    speaker_kind: SpeakerKind::Agent,
                    channel: Channel::Backchannel,
                    text: serde_json::to_string(d).expect("digest serializes"),
                })
                .collect();
            let bd = deliver_messages(&topology, &wire)?;
            // the lowest agent coordinates: its own digest plus everything it received
            let mut received = vec![digests[0].clone()];
            for i in bd.inbox(topology.agent_index(0)) {
                let d: MoodDigest = serde_json::from_str(&wire[i].text)
                    .map_err(|e| Error::ProtocolViolation(format!("malformed digest from {}: {e}", wire[i].speaker_id)))?;
                received.push(d);
            }
            for (u, receivers) in wire.into_iter().zip(bd.receivers) {
                log.push(DeliveredUtterance {
                    utterance: u,
                    receivers: receivers.iter().map(|&r| topology.entity_id(r)).collect(),
                    expressed_valence: None,
                });
            }
            vec![aggregate_backchannel(&received)?]
        } else {
            digests
                .iter()
                .map(|d| aggregate_backchannel(std::slice::from_ref(d)))
                .collect::<Result<_>>()?
        };

        let mut snapshots = Vec::with_capacity(units.len());
        for (ui, (unit, pool)) in units.iter_mut().zip(&pools).enumerate() {
            let observed = pool.mean_valence();
            let carried = unit.history.last().copied().unwrap_or(0.0);
            unit.history.push(observed.unwrap_or(carried));
            let snapshot = group_moods(t, &pool.patterns, &pool.valences(), &grouping, clustering_seed(config.seed, t, ui))?;
            snapshots.push(UnitSnapshot {
                unit: unit.name.clone(),
                observed_mean: observed,
                snapshot,
            });
        }

        let mut plans: Vec<InterventionPlan> = Vec::new();
        let mut rewards = Vec::new();
        if orch.enabled {
            let (due, rest): (Vec<Pending>, Vec<Pending>) = pending
                .into_iter()
                .partition(|p| p.decided_at + orch.horizon == t as usize);
            pending = rest;
            for p in due {
                let reward = compute_reward(&units[p.unit].history, p.decided_at, orch.horizon)?;
                policy.update(p.context, p.strategy, reward)?;
                rewards.push(RewardRecord {
                    unit: units[p.unit].name.clone(),
                    context: p.context,
                    strategy: p.strategy,
                    decided_at: p.decided_at as u64,
                    reward,
                });
            }

            for (ui, unit) in units.iter().enumerate() {
                let Some(snapshot) = &snapshots[ui].snapshot else { continue };
                let strategy = select_strategy(snapshot, &policy, orch.divergence_threshold, &mut policy_rng);
                let context = ContextKey::of(snapshot);
                let targets: Vec<(String, f64)> = pools[ui]
                    .readings
                    .iter()
                    .map(|r| (r.human_id.clone(), r.ewma_valence))
                    .collect();
                let agents: Vec<String> = unit.agents.iter().map(|&j| agent_id(j)).collect();
                let unit_plans = allocate_agents(t, strategy, context, &targets, &agents, &cooldowns, orch.budget, |a, h| {
                    match (
                        topology.parse_entity(a, SpeakerKind::Agent),
                        topology.parse_entity(h, SpeakerKind::Human),
                    ) {
                        (Ok(a), Ok(h)) => topology.can_reach(a - nh, h),
                        _ => false,
                    }
                });
                cooldowns.record(&unit_plans);
                if !unit_plans.is_empty() {
                    pending.push(Pending {
                        unit: ui,
                        decided_at: t as usize,
                        context,
                        strategy: strategy.name,
                    });
                }
                plans.extend(unit_plans);
            }
        }

        let mut spoken = Vec::with_capacity(plans.len());
        for plan in &plans {
            let mut u = render_response(plan, templates, topology.intervention_channel(), &mut render_rng)?;
            if config.generator.enabled {
                let agent = topology.parse_entity(&plan.agent_id, SpeakerKind::Agent)? - nh;
                let target = topology.parse_entity(&plan.target_human_id, SpeakerKind::Human)?;
                let request = GenerationRequest {
                    strategy: plan.strategy.name,
                    group_class: plan.context_key.group_class,
                    dominant_emotion: plan.context_key.dominant_emotion,
                    target_recent_text: memories[agent].last_text(target),
                    max_tokens: config.generator.max_tokens,
                };
                if let Generated::Text(text) =
                    call_external_generator(&request, &config.generator, plan.strategy.expressed_valence, lexicon)
                {
                    u.text = text;
                }
            }
            spoken.push(u);
        }
        let agent_delivery = deliver_messages(&topology, &spoken)?;
        for ((u, receivers), plan) in spoken.into_iter().zip(agent_delivery.receivers).zip(&plans) {
            let sender = topology.parse_entity(&u.speaker_id, SpeakerKind::Agent)?;
            let expressed = if exact {
                plan.strategy.expressed_valence
            } else {
                sense_text(&u.text, lexicon).valence
            };
            influence.push((sender, expressed, plan.strategy.expressiveness, receivers.clone()));
            log.push(DeliveredUtterance {
                utterance: u,
                receivers: receivers.iter().map(|&r| topology.entity_id(r)).collect(),
                expressed_valence: Some(expressed),
            });
        }

        let mut incoming: Vec<Vec<Incoming>> = vec![Vec::new(); nh];
        for (sender, expressed, expressiveness, receivers) in &influence {
            for &r in receivers.iter().filter(|&&r| !topology.is_agent(r)) {
                incoming[r].push(Incoming {
                    expressed: *expressed,
                    gamma: expressiveness * topology.openness[*sender][r] * humans[r].susceptibility,
                });
            }
        }
        humans = step_contagion(&humans, &incoming, config.contagion.dt, config.contagion.decay)?;

        let valences: Vec<f64> = humans.iter().map(|h| h.valence).collect();
        let mean_valence = valences.iter().sum::<f64>() / nh as f64;
        let (group_class, prevalent_emotion) = snapshots
            .iter()
            .find_map(|s| s.snapshot.as_ref())
            .map_or((Band::of(mean_valence), Emotion::Neutral), |s| (s.group_class, s.dominant_emotion));
        steps.push(StepRecord {
            step: t,
            valence_variance: variance(&valences),
            valences,
            mean_valence,
            group_class,
            prevalent_emotion,
            utterances: log,
            snapshots,
            interventions: plans,
            rewards,
        });
    }

    Ok(RunTrace {
        initial_valences: initial,
        steps,
        policy: policy.table,
    })
}
