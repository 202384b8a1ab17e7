//! Shared affect vocabulary: emotion categories, valence bands, utterances,
//! mood samples and patterns, contagion parameters and group snapshots.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Valence at or above this is positive; at or below its negation, negative.
pub const BAND_THRESHOLD: f64 = 0.2;

/// Tolerance used when checking that emotion weights sum to one.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Emotion categories. Declaration order is the tie-break order everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Joy,
    Sadness,
    Anger,
    Fear,
    Neutral,
}

impl Emotion {
    pub const ALL: [Emotion; 5] = [
        Emotion::Joy,
        Emotion::Sadness,
        Emotion::Anger,
        Emotion::Fear,
        Emotion::Neutral,
    ];

    /// The four non-neutral categories, in tie-break order.
    pub const AFFECTIVE: [Emotion; 4] = [Emotion::Joy, Emotion::Sadness, Emotion::Anger, Emotion::Fear];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Joy => "joy",
            Emotion::Sadness => "sadness",
            Emotion::Anger => "anger",
            Emotion::Fear => "fear",
            Emotion::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joy" | "happiness" => Ok(Emotion::Joy),
            "sadness" => Ok(Emotion::Sadness),
            "anger" => Ok(Emotion::Anger),
            "fear" => Ok(Emotion::Fear),
            "neutral" => Ok(Emotion::Neutral),
            other => Err(Error::InvalidArgument(format!("unknown emotion category `{other}`"))),
        }
    }
}

/// Index of the largest weight; ties go to the earliest index.
pub(crate) fn argmax_first(weights: &[f64]) -> usize {
    let mut best = 0;
    for (i, &w) in weights.iter().enumerate().skip(1) {
        if w > weights[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Positive,
    Negative,
    Neutral,
}

impl Band {
    pub fn of(valence: f64) -> Band {
        if valence >= BAND_THRESHOLD {
            Band::Positive
        } else if valence <= -BAND_THRESHOLD {
            Band::Negative
        } else {
            Band::Neutral
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Positive => "positive",
            Band::Negative => "negative",
            Band::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which negative category a synthetic human falls into when their valence is low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Temperament {
    SadLeaning,
    AngerLeaning,
    FearLeaning,
}

impl Temperament {
    pub const ALL: [Temperament; 3] = [
        Temperament::SadLeaning,
        Temperament::AngerLeaning,
        Temperament::FearLeaning,
    ];

    pub fn negative_emotion(self) -> Emotion {
        match self {
            Temperament::SadLeaning => Emotion::Sadness,
            Temperament::AngerLeaning => Emotion::Anger,
            Temperament::FearLeaning => Emotion::Fear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionVector {
    pub joy: f64,
    pub sadness: f64,
    pub anger: f64,
    pub fear: f64,
    pub neutral: f64,
    pub valence: f64,
    pub intensity: f64,
}

impl EmotionVector {
    /// A one-hot vector on `emotion`.
    pub fn pure(emotion: Emotion, valence: f64, intensity: f64) -> Self {
        let mut weights = [0.0; 5];
        weights[emotion.index()] = 1.0;
        Self::from_weights(weights, valence, intensity)
    }

    pub fn from_weights(weights: [f64; 5], valence: f64, intensity: f64) -> Self {
        EmotionVector {
            joy: weights[0],
            sadness: weights[1],
            anger: weights[2],
            fear: weights[3],
            neutral: weights[4],
            valence,
            intensity,
        }
    }

    pub fn weights(&self) -> [f64; 5] {
        [self.joy, self.sadness, self.anger, self.fear, self.neutral]
    }

    pub fn weight(&self, emotion: Emotion) -> f64 {
        self.weights()[emotion.index()]
    }

    pub fn dominant(&self) -> Emotion {
        Emotion::ALL[argmax_first(&self.weights())]
    }

    pub fn is_normalized(&self) -> bool {
        let sum: f64 = self.weights().iter().sum();
        (sum - 1.0).abs() <= SUM_TOLERANCE
    }
}

/// Maps a scalar valence onto a categorical emotion through a fixed temperament.
pub fn derive_emotion_from_valence(valence: f64, temperament: Temperament) -> EmotionVector {
    let category = if valence > BAND_THRESHOLD {
        Emotion::Joy
    } else if valence < -BAND_THRESHOLD {
        temperament.negative_emotion()
    } else {
        Emotion::Neutral
    };
    EmotionVector::pure(category, valence, valence.abs())
}

/// Orders entity ids naturally: `h2` before `h10`.
pub fn compare_ids(a: &str, b: &str) -> std::cmp::Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        (&s[..cut], s[cut..].parse().ok())
    }
    let (pa, na) = split(a);
    let (pb, nb) = split(b);
    pa.cmp(pb).then(na.cmp(&nb)).then(a.cmp(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeakerKind {
    Human,
    Agent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Medium,
    Private,
    Backchannel,
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "medium" => Ok(Channel::Medium),
            "private" => Ok(Channel::Private),
            "backchannel" => Ok(Channel::Backchannel),
            other => Err(Error::ProtocolViolation(format!("unknown channel `{other}`"))),
        }
    }
}

/// A single message. Also the transcript line schema: `{t, speaker_id, speaker_kind, channel, text}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Utterance {
    #[serde(rename = "t")]
    pub step: u64,
    pub speaker_id: String,
    pub speaker_kind: SpeakerKind,
    pub channel: Channel,
    pub text: String,
}

impl Utterance {
    pub fn validate(&self) -> Result<()> {
        if self.channel == Channel::Backchannel && self.speaker_kind != SpeakerKind::Agent {
            return Err(Error::ProtocolViolation(format!(
                "backchannel utterance from non-agent `{}`",
                self.speaker_id
            )));
        }
        Ok(())
    }

    pub fn is_question(&self) -> bool {
        self.text.contains('?')
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoodSample {
    pub step: u64,
    pub speaker_id: String,
    pub emotion: EmotionVector,
    pub ewma_valence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoodPattern {
    pub speaker_id: String,
    pub band: Band,
    pub start_step: u64,
    pub end_step: u64,
    pub mean_intensity: f64,
    /// Number of samples in the run.
    pub duration: usize,
    pub dominant_emotion: Emotion,
    /// Mean weight of joy, sadness, anger, fear over the run.
    pub emotion_fractions: [f64; 4],
    #[serde(default)]
    pub refined: bool,
}

impl MoodPattern {
    pub fn dominant_fraction(&self) -> Option<f64> {
        match self.dominant_emotion {
            Emotion::Neutral => None,
            e => Some(self.emotion_fractions[e.index()]),
        }
    }

    pub fn weight(&self) -> f64 {
        self.mean_intensity * self.duration as f64
    }
}

/// Per-entity contagion parameters. Entities are indexed densely; the
/// openness matrix is row = sender, column = receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContagionParams {
    pub expressiveness: Vec<f64>,
    pub openness: Vec<Vec<f64>>,
    pub susceptibility: Vec<f64>,
    pub dt: f64,
}

impl ContagionParams {
    pub fn validate(&self) -> Result<()> {
        let n = self.expressiveness.len();
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.susceptibility.len() != n || self.openness.len() != n {
            return Err(Error::InvalidArgument("contagion parameter dimensions disagree".into()));
        }
        if !self.expressiveness.iter().chain(&self.susceptibility).all(|&v| unit(v)) {
            return Err(Error::InvalidArgument("expressiveness and susceptibility must lie in [0,1]".into()));
        }
        for row in &self.openness {
            if row.len() != n || !row.iter().all(|&v| unit(v)) {
                return Err(Error::InvalidArgument("openness must be a square matrix over [0,1]".into()));
            }
        }
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(Error::InvalidArgument(format!("timestep {} outside (0,1]", self.dt)));
        }
        Ok(())
    }

    pub fn channel_strength(&self, sender: usize, receiver: usize) -> f64 {
        channel_strength(
            self.expressiveness[sender],
            self.openness[sender][receiver],
            self.susceptibility[receiver],
        )
    }
}

/// gamma = expressiveness * openness * susceptibility.
pub fn channel_strength(expressiveness: f64, openness: f64, susceptibility: f64) -> f64 {
    expressiveness * openness * susceptibility
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub centroid: Vec<f64>,
    /// Indices into the pattern list the snapshot was built from.
    pub members: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMoodSnapshot {
    pub step: u64,
    pub clusters: Vec<Cluster>,
    pub prevalent_cluster_id: usize,
    pub group_class: Band,
    pub divergence: f64,
    pub dominant_emotion: Emotion,
}

impl GroupMoodSnapshot {
    pub fn prevalent(&self) -> &Cluster {
        &self.clusters[self.prevalent_cluster_id]
    }

    pub fn member_count(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }
}
