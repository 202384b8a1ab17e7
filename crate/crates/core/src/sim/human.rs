use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::affect::{derive_emotion_from_valence, Channel, Emotion, SpeakerKind, Temperament, Utterance};
use crate::error::{Error, Result};
use crate::observation::{preprocess, score_sentiment, Lexicon};

/// Phrases scoring within this distance of the speaker's valence are preferred.
pub const PHRASE_MATCH_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticHuman {
    pub id: String,
    pub valence: f64,
    pub temperament: Temperament,
    pub susceptibility: f64,
    pub expressiveness: f64,
    pub p_speak: f64,
}

impl SyntheticHuman {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(-1.0..=1.0).contains(&self.valence) {
            return Err(Error::InvalidArgument(format!("{}: valence {} outside [-1,1]", self.id, self.valence)));
        }
        if !unit(self.susceptibility) || !unit(self.expressiveness) || !unit(self.p_speak) {
            return Err(Error::InvalidArgument(format!(
                "{}: susceptibility, expressiveness and p_speak must lie in [0,1]",
                self.id
            )));
        }
        Ok(())
    }

    pub fn category(&self) -> Emotion {
        derive_emotion_from_valence(self.valence, self.temperament).dominant()
    }
}

const PHRASES: &[(Emotion, &[&str])] = &[
    (
        Emotion::Joy,
        &[
            "interesting point",
            "calm and steady",
            "cool idea",
            "cool, sounds good",
            "i hope so",
            "nice, thanks",
            "good stuff",
            "that was fun",
            "glad we talked",
            "happy to be here",
            "this is great",
            "i love this",
            "awesome day, feeling amazing",
            "really happy right now",
            "very happy today",
        ],
    ),
    (
        Emotion::Neutral,
        &[
            "unsure about that",
            "okay, i am tired",
            "meh",
            "i see",
            "let me think",
            "what time is the call",
            "okay",
            "alright then",
            "okay, that is interesting",
            "interesting point",
        ],
    ),
    (
        Emotion::Sadness,
        &[
            "meh, tired",
            "feeling a bit tired",
            "not good",
            "kind of lonely today",
            "disappointed again",
            "i feel sad",
            "so unhappy about this",
            "i want to cry",
            "very lonely",
            "really sad",
            "depressed",
            "miserable and hopeless",
            "very sad",
            "extremely miserable",
        ],
    ),
    (
        Emotion::Anger,
        &[
            "meh, ugh",
            "ugh",
            "not cool",
            "so annoyed",
            "this is bad",
            "i am mad",
            "frustrated again",
            "angry about this",
            "i hate this",
            "really angry",
            "furious",
            "this is the worst",
            "extremely furious",
        ],
    ),
    (
        Emotion::Fear,
        &[
            "unsure about this",
            "nervous, ugh",
            "a little nervous",
            "kind of worried",
            "anxious about it",
            "i am afraid",
            "scared",
            "really scared",
            "panic mode",
            "terrified",
            "very scared",
            "extremely terrified",
        ],
    ),
];

/// Phrase bank keyed by emotion category, each phrase scored once against a lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseBank {
    phrases: BTreeMap<Emotion, Vec<(String, f64)>>,
}

impl PhraseBank {
    pub fn builtin(lexicon: &Lexicon) -> Self {
        let mut phrases = BTreeMap::new();
        for &(emotion, texts) in PHRASES {
            let scored = texts
                .iter()
                .map(|t| (t.to_string(), score_sentiment(&preprocess(t), lexicon)))
                .collect();
            phrases.insert(emotion, scored);
        }
        PhraseBank { phrases }
    }

    pub fn phrases(&self, category: Emotion) -> &[(String, f64)] {
        self.phrases.get(&category).map_or(&[], Vec::as_slice)
    }

    /// Uniform among phrases within [`PHRASE_MATCH_WINDOW`] of `valence` that
    /// do not overstate it (score between 0 and `valence`), otherwise the
    /// nearest such phrase, otherwise the nearest phrase. Ties go to the first.
    pub fn choose<R: Rng + ?Sized>(&self, category: Emotion, valence: f64, rng: &mut R) -> Option<&(String, f64)> {
        let pool = self.phrases(category);
        let (lo, hi) = if valence >= 0.0 { (0.0, valence) } else { (valence, 0.0) };
        let understated: Vec<&(String, f64)> = pool.iter().filter(|(_, s)| (lo..=hi).contains(s)).collect();
        let close: Vec<&(String, f64)> = understated
            .iter()
            .copied()
            .filter(|(_, s)| (s - valence).abs() <= PHRASE_MATCH_WINDOW)
            .collect();
        if !close.is_empty() {
            return Some(close[rng.random_range(0..close.len())]);
        }
        nearest(understated.into_iter(), valence).or_else(|| nearest(pool.iter(), valence))
    }
}

fn nearest<'a>(phrases: impl Iterator<Item = &'a (String, f64)>, valence: f64) -> Option<&'a (String, f64)> {
    phrases.fold(None, |best, p| match best {
        Some(b) if (b.1 - valence).abs() <= (p.1 - valence).abs() => Some(b),
        _ => Some(p),
    })
}

pub fn generate_human_message<R: Rng + ?Sized>(
    human: &SyntheticHuman,
    step: u64,
    channel: Channel,
    bank: &PhraseBank,
    rng: &mut R,
) -> Option<Utterance> {
    if !rng.random_bool(human.p_speak) {
        return None;
    }
    let (text, _) = bank.choose(human.category(), human.valence, rng)?;
    Some(Utterance {
        step,
        speaker_id: human.id.clone(),
        speaker_kind: SpeakerKind::Human,
        channel,
        text: text.clone(),
    })
}
