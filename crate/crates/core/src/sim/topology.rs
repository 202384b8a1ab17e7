use std::fmt;

use serde::{Deserialize, Serialize};

use crate::affect::{Channel, SpeakerKind, Utterance};
use crate::error::{Error, Result};

/// Deployment configurations of humans (H), agents (Ag) and the shared medium (M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopologyKind {
    /// One human per agent, talking privately.
    #[serde(rename = "HMA-dyadic")]
    HmaDyadic,
    /// Humans share a medium; personal agents see only their own human.
    #[serde(rename = "AHM-isolated")]
    AhmIsolated,
    /// As `AhmIsolated`, plus an agent backchannel.
    #[serde(rename = "AHM-backchannel")]
    AhmBackchannel,
    /// Agents read the medium and may post to it, with no private channels.
    #[serde(rename = "HAM-observer")]
    HamObserver,
    /// Agents take part in the medium and each has a conversation partner.
    #[serde(rename = "HAM-participant")]
    HamParticipant,
    /// As `HamParticipant`, plus an agent backchannel.
    #[serde(rename = "HAM-coordinated")]
    HamCoordinated,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 6] = [
        TopologyKind::HmaDyadic,
        TopologyKind::AhmIsolated,
        TopologyKind::AhmBackchannel,
        TopologyKind::HamObserver,
        TopologyKind::HamParticipant,
        TopologyKind::HamCoordinated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::HmaDyadic => "HMA-dyadic",
            TopologyKind::AhmIsolated => "AHM-isolated",
            TopologyKind::AhmBackchannel => "AHM-backchannel",
            TopologyKind::HamObserver => "HAM-observer",
            TopologyKind::HamParticipant => "HAM-participant",
            TopologyKind::HamCoordinated => "HAM-coordinated",
        }
    }

    pub fn has_backchannel(self) -> bool {
        matches!(self, TopologyKind::AhmBackchannel | TopologyKind::HamCoordinated)
    }

    pub fn agents_on_medium(self) -> bool {
        matches!(
            self,
            TopologyKind::HamObserver | TopologyKind::HamParticipant | TopologyKind::HamCoordinated
        )
    }

    pub fn humans_on_medium(self) -> bool {
        self != TopologyKind::HmaDyadic
    }

    fn is_personal_assistant(self) -> bool {
        matches!(self, TopologyKind::AhmIsolated | TopologyKind::AhmBackchannel)
    }

    /// Cardinality rules, as a human-readable violation.
    pub fn check_cardinality(self, n_humans: usize, n_agents: usize) -> std::result::Result<(), String> {
        if n_humans == 0 {
            return Err("at least one human is required".into());
        }
        if n_agents == 0 {
            return Err("at least one agent is required".into());
        }
        match self {
            TopologyKind::HmaDyadic if n_humans != n_agents => {
                Err(format!("HMA-dyadic pairs humans with agents: n_humans ({n_humans}) must equal n_agents ({n_agents})"))
            }
            k if k.is_personal_assistant() && n_agents > n_humans => Err(format!(
                "{} assigns one personal agent per human: n_agents ({n_agents}) must not exceed n_humans ({n_humans})",
                k.as_str()
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense entity index: humans `0..n_humans`, then agents.
pub type EntityIndex = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub kind: TopologyKind,
    pub n_humans: usize,
    pub n_agents: usize,
    /// Openness, row = sender, column = receiver, over all entities.
    pub openness: Vec<Vec<f64>>,
}

pub fn human_id(i: usize) -> String {
    format!("h{i}")
}

pub fn agent_id(j: usize) -> String {
    format!("a{j}")
}

impl Topology {
    pub fn new(kind: TopologyKind, n_humans: usize, n_agents: usize, openness: Vec<Vec<f64>>) -> Result<Self> {
        kind.check_cardinality(n_humans, n_agents)
            .map_err(Error::InvalidArgument)?;
        let n = n_humans + n_agents;
        if openness.len() != n || openness.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!("openness matrix must be {n}x{n}")));
        }
        if openness.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("openness entries must lie in [0,1]".into()));
        }
        Ok(Topology {
            kind,
            n_humans,
            n_agents,
            openness,
        })
    }

    /// Every directed pair open at `alpha`, self-loops closed.
    pub fn uniform(kind: TopologyKind, n_humans: usize, n_agents: usize, alpha: f64) -> Result<Self> {
        let n = n_humans + n_agents;
        let openness = (0..n)
            .map(|s| (0..n).map(|r| if s == r { 0.0 } else { alpha }).collect())
            .collect();
        Topology::new(kind, n_humans, n_agents, openness)
    }

    pub fn entity_count(&self) -> usize {
        self.n_humans + self.n_agents
    }

    pub fn agent_index(&self, j: usize) -> EntityIndex {
        self.n_humans + j
    }

    pub fn is_agent(&self, e: EntityIndex) -> bool {
        e >= self.n_humans
    }

    pub fn entity_id(&self, e: EntityIndex) -> String {
        if self.is_agent(e) {
            agent_id(e - self.n_humans)
        } else {
            human_id(e)
        }
    }

    pub fn parse_entity(&self, id: &str, kind: SpeakerKind) -> Result<EntityIndex> {
        let bad = || Error::ProtocolViolation(format!("unknown {kind:?} entity `{id}`"));
        let (prefix, limit) = match kind {
            SpeakerKind::Human => ('h', self.n_humans),
            SpeakerKind::Agent => ('a', self.n_agents),
        };
        let idx: usize = id
            .strip_prefix(prefix)
            .and_then(|n| n.parse().ok())
            .filter(|&i| i < limit)
            .ok_or_else(bad)?;
        Ok(match kind {
            SpeakerKind::Human => idx,
            SpeakerKind::Agent => self.agent_index(idx),
        })
    }

    /// Agent index paired with human `h`, if any.
    pub fn paired_agent(&self, h: usize) -> Option<usize> {
        match self.kind {
            TopologyKind::HamObserver => None,
            _ => (h < self.n_agents).then_some(h),
        }
    }

    /// Human index paired with agent `a`, if any.
    pub fn paired_human(&self, a: usize) -> Option<usize> {
        match self.kind {
            TopologyKind::HamObserver => None,
            _ => (a < self.n_humans).then_some(a),
        }
    }

    fn on_medium(&self, e: EntityIndex) -> bool {
        if self.is_agent(e) {
            self.kind.agents_on_medium()
        } else {
            self.kind.humans_on_medium()
        }
    }

    /// Channel humans speak on.
    pub fn human_channel(&self) -> Channel {
        if self.kind.humans_on_medium() {
            Channel::Medium
        } else {
            Channel::Private
        }
    }

    /// Channel agent interventions go out on.
    pub fn intervention_channel(&self) -> Channel {
        if self.kind.agents_on_medium() {
            Channel::Medium
        } else {
            Channel::Private
        }
    }

    /// Whether agent `a` can address human `h` with an intervention.
    pub fn can_reach(&self, a: usize, h: usize) -> bool {
        if self.kind.agents_on_medium() {
            self.openness[self.agent_index(a)][h] > 0.0
        } else {
            self.paired_human(a) == Some(h)
        }
    }

    /// Receivers of `u` under this topology's channel rules.
    pub fn receivers(&self, u: &Utterance) -> Result<Vec<EntityIndex>> {
        u.validate()?;
        let sender = self.parse_entity(&u.speaker_id, u.speaker_kind)?;
        let violation = |what: &str| {
            Err(Error::ProtocolViolation(format!(
                "{} cannot send on {what} in {}",
                u.speaker_id, self.kind
            )))
        };
        match u.channel {
            Channel::Medium => {
                if !self.on_medium(sender) {
                    return violation("the medium");
                }
                let mut out: Vec<EntityIndex> = (0..self.entity_count())
                    .filter(|&r| r != sender && self.on_medium(r) && self.openness[sender][r] > 0.0)
                    .collect();
                // personal assistants see their own human's posts, forwarded privately
                if self.kind.is_personal_assistant() && !self.is_agent(sender) {
                    if let Some(a) = self.paired_agent(sender) {
                        out.push(self.agent_index(a));
                    }
                }
                Ok(out)
            }
            Channel::Private => {
                let counterpart = match (self.kind, self.is_agent(sender)) {
                    (TopologyKind::HamObserver, _) => None,
                    (_, true) => self.paired_human(sender - self.n_humans),
                    (_, false) => self.paired_agent(sender).map(|a| self.agent_index(a)),
                };
                match counterpart {
                    Some(c) => Ok(vec![c]),
                    None => violation("a private channel"),
                }
            }
            Channel::Backchannel => {
                if !self.kind.has_backchannel() {
                    return violation("the backchannel");
                }
                Ok((0..self.n_agents)
                    .map(|j| self.agent_index(j))
                    .filter(|&r| r != sender)
                    .collect())
            }
        }
    }
}

/// Receiver sets for one step's utterances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Delivery {
    pub receivers: Vec<Vec<EntityIndex>>,
}

impl Delivery {
    /// Indices of utterances delivered to entity `e`.
    pub fn inbox(&self, e: EntityIndex) -> Vec<usize> {
        self.receivers
            .iter()
            .enumerate()
            .filter(|(_, rs)| rs.contains(&e))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total(&self) -> usize {
        self.receivers.iter().map(Vec::len).sum()
    }
}

pub fn deliver_messages(topology: &Topology, utterances: &[Utterance]) -> Result<Delivery> {
    Ok(Delivery {
        receivers: utterances
            .iter()
            .map(|u| topology.receivers(u))
            .collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn utter(speaker: &str, kind: SpeakerKind, channel: Channel) -> Utterance {
        Utterance {
            step: 0,
            speaker_id: speaker.into(),
            speaker_kind: kind,
            channel,
            text: "hi".into(),
        }
    }

    #[test]
    fn dyadic_private_reaches_partner_only() {
        let t = Topology::uniform(TopologyKind::HmaDyadic, 3, 3, 1.0).unwrap();
        let d = deliver_messages(&t, &[utter("h1", SpeakerKind::Human, Channel::Private)]).unwrap();
        assert_eq!(d.receivers, vec![vec![t.agent_index(1)]]);
        assert!(t.receivers(&utter("h1", SpeakerKind::Human, Channel::Medium)).is_err());
    }

    #[test]
    fn participant_medium_reaches_everyone() {
        let t = Topology::uniform(TopologyKind::HamParticipant, 3, 2, 1.0).unwrap();
        let r = t.receivers(&utter("h0", SpeakerKind::Human, Channel::Medium)).unwrap();
        assert_eq!(r, vec![1, 2, 3, 4]);
        let r = t.receivers(&utter("a1", SpeakerKind::Agent, Channel::Medium)).unwrap();
        assert_eq!(r, vec![0, 1, 2, 3]);
    }

    #[test]
    fn isolated_rejects_backchannel() {
        let t = Topology::uniform(TopologyKind::AhmIsolated, 2, 2, 1.0).unwrap();
        let err = t.receivers(&utter("a0", SpeakerKind::Agent, Channel::Backchannel)).unwrap_err();
        assert!(matches!(err, Error::ProtocolViolation(_)));
    }

    #[test]
    fn assistants_get_forwarded_posts_only() {
        let t = Topology::uniform(TopologyKind::AhmBackchannel, 3, 2, 1.0).unwrap();
        assert_eq!(t.receivers(&utter("h0", SpeakerKind::Human, Channel::Medium)).unwrap(), vec![1, 2, 3]);
        // h2 has no assistant
        assert_eq!(t.receivers(&utter("h2", SpeakerKind::Human, Channel::Medium)).unwrap(), vec![0, 1]);
        assert!(t.receivers(&utter("a0", SpeakerKind::Agent, Channel::Medium)).is_err());
        assert_eq!(t.receivers(&utter("a0", SpeakerKind::Agent, Channel::Backchannel)).unwrap(), vec![4]);
    }

    #[test]
    fn observer_has_no_private_channel() {
        let t = Topology::uniform(TopologyKind::HamObserver, 2, 1, 1.0).unwrap();
        assert!(t.receivers(&utter("a0", SpeakerKind::Agent, Channel::Private)).is_err());
        assert_eq!(t.receivers(&utter("a0", SpeakerKind::Agent, Channel::Medium)).unwrap(), vec![0, 1]);
    }

    #[test]
    fn closed_openness_blocks_medium() {
        let mut t = Topology::uniform(TopologyKind::HamParticipant, 3, 1, 1.0).unwrap();
        t.openness[0][2] = 0.0;
        assert_eq!(t.receivers(&utter("h0", SpeakerKind::Human, Channel::Medium)).unwrap(), vec![1, 3]);
    }

    #[test]
    fn unknown_speakers_rejected() {
        let t = Topology::uniform(TopologyKind::HamParticipant, 2, 1, 1.0).unwrap();
        assert!(t.receivers(&utter("h7", SpeakerKind::Human, Channel::Medium)).is_err());
        assert!(t.receivers(&utter("a0", SpeakerKind::Human, Channel::Medium)).is_err());
        assert!(t.receivers(&utter("h0", SpeakerKind::Human, Channel::Backchannel)).is_err());
    }

    #[test]
    fn cardinality() {
        assert!(TopologyKind::HmaDyadic.check_cardinality(3, 2).is_err());
        assert!(TopologyKind::AhmIsolated.check_cardinality(2, 3).is_err());
        assert!(TopologyKind::HamCoordinated.check_cardinality(2, 5).is_ok());
        assert!(TopologyKind::HamCoordinated.check_cardinality(0, 1).is_err());
    }
}
