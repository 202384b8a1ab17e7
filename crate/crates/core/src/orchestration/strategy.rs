use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::affect::{Band, Emotion, GroupMoodSnapshot};
use crate::error::{Error, Result};

pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Mirror,
    Uplift,
    DeEscalate,
    Reassure,
    EmpathizeUplift,
    EngageHumor,
}

impl StrategyName {
    pub const ALL: [StrategyName; 6] = [
        StrategyName::Mirror,
        StrategyName::Uplift,
        StrategyName::DeEscalate,
        StrategyName::Reassure,
        StrategyName::EmpathizeUplift,
        StrategyName::EngageHumor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::Mirror => "mirror",
            StrategyName::Uplift => "uplift",
            StrategyName::DeEscalate => "de-escalate",
            StrategyName::Reassure => "reassure",
            StrategyName::EmpathizeUplift => "empathize-uplift",
            StrategyName::EngageHumor => "engage-humor",
        }
    }

    /// Catalog entry with nominal expressed valence and expressiveness.
    pub fn strategy(self) -> Strategy {
        let (expressed_valence, expressiveness) = match self {
            StrategyName::Mirror => (0.5, 0.6),
            StrategyName::Uplift => (0.7, 0.8),
            StrategyName::DeEscalate => (0.25, 0.7),
            StrategyName::Reassure => (0.3, 0.7),
            StrategyName::EmpathizeUplift => (0.35, 0.8),
            StrategyName::EngageHumor => (0.5, 0.6),
        };
        Strategy {
            name: self,
            expressed_valence,
            expressiveness,
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub name: StrategyName,
    pub expressed_valence: f64,
    pub expressiveness: f64,
}

/// Bandit context: the group class and dominant emotion of a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextKey {
    pub group_class: Band,
    pub dominant_emotion: Emotion,
}

impl ContextKey {
    pub fn of(snapshot: &GroupMoodSnapshot) -> Self {
        ContextKey {
            group_class: snapshot.group_class,
            dominant_emotion: snapshot.dominant_emotion,
        }
    }
}

impl fmt::Display for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.group_class, self.dominant_emotion)
    }
}

impl FromStr for ContextKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad context key `{s}`"));
        let (band, emotion) = s.split_once('/').ok_or_else(bad)?;
        let group_class = match band {
            "positive" => Band::Positive,
            "negative" => Band::Negative,
            "neutral" => Band::Neutral,
            _ => return Err(bad()),
        };
        Ok(ContextKey {
            group_class,
            dominant_emotion: emotion.parse()?,
        })
    }
}

impl Serialize for ContextKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ContextKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The fixed decision tree. The first entry is the tree's recommendation;
/// the rest are the alternatives the optimizer may explore.
pub fn candidate_strategies(group_class: Band, dominant: Emotion, divergence: f64, threshold: f64) -> Vec<StrategyName> {
    use StrategyName::*;
    match group_class {
        Band::Negative if divergence > threshold => {
            let primary = match dominant {
                Emotion::Anger => DeEscalate,
                Emotion::Sadness => Uplift,
                Emotion::Fear => Reassure,
                Emotion::Joy | Emotion::Neutral => EmpathizeUplift,
            };
            let mut set = vec![primary];
            set.extend([DeEscalate, Uplift, Reassure, EmpathizeUplift].into_iter().filter(|&s| s != primary));
            set
        }
        Band::Negative => vec![EmpathizeUplift, Uplift, Reassure],
        Band::Neutral => vec![EngageHumor, Uplift, Mirror],
        Band::Positive => vec![Mirror, EngageHumor],
    }
}
