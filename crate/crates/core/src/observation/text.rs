use crate::affect::{Emotion, EmotionVector};

use super::Lexicon;

/// Tokens before a scored token that are checked for negators.
pub const NEGATION_WINDOW: usize = 3;
/// Tokens before a scored token that are checked for intensifiers.
pub const INTENSIFIER_WINDOW: usize = 2;

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '…' | '“' | '”' | '‘' | '’' | '¿' | '¡' | '«' | '»')
}

/// Lowercase, split on whitespace, strip leading and trailing punctuation, drop empties.
pub fn preprocess(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|tok| tok.trim_matches(is_punct).to_lowercase())
        .filter(|tok| !tok.is_empty())
        .collect()
}

fn preceding<S: AsRef<str>>(tokens: &[S], i: usize, window: usize) -> &[S] {
    &tokens[i.saturating_sub(window)..i]
}

fn negated<S: AsRef<str>>(tokens: &[S], i: usize, lexicon: &Lexicon) -> bool {
    preceding(tokens, i, NEGATION_WINDOW)
        .iter()
        .any(|t| lexicon.is_negator(t.as_ref()))
}

/// Mean of effective token weights, clamped to [-1, 1]. No hits scores 0.
pub fn score_sentiment<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> f64 {
    let mut sum = 0.0;
    let mut hits = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        let Some(weight) = lexicon.valence(tok.as_ref()) else {
            continue;
        };
        let boost: f64 = preceding(tokens, i, INTENSIFIER_WINDOW)
            .iter()
            .filter_map(|t| lexicon.intensifier(t.as_ref()))
            .product();
        let sign = if negated(tokens, i, lexicon) { -1.0 } else { 1.0 };
        sum += weight * boost * sign;
        hits += 1;
    }
    if hits == 0 {
        return 0.0;
    }
    (sum / hits as f64).clamp(-1.0, 1.0)
}

pub fn detect_emotions<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> EmotionVector {
    let mut acc = [0.0f64; 5];
    for (i, tok) in tokens.iter().enumerate() {
        if let Some((category, weight)) = lexicon.emotion(tok.as_ref()) {
            if !negated(tokens, i, lexicon) {
                acc[category.index()] += weight;
            }
        }
    }
    let valence = score_sentiment(tokens, lexicon);
    let total: f64 = acc.iter().sum();
    if total == 0.0 {
        return EmotionVector::pure(Emotion::Neutral, valence, valence.abs());
    }
    for w in &mut acc {
        *w /= total;
    }
    EmotionVector::from_weights(acc, valence, valence.abs())
}

/// Preprocess + detect in one call.
pub fn sense_text(text: &str, lexicon: &Lexicon) -> EmotionVector {
    detect_emotions(&preprocess(text), lexicon)
}
