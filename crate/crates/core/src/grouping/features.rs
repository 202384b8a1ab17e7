use serde::{Deserialize, Serialize};

use crate::affect::{Band, MoodPattern};
use crate::error::{Error, Result};

pub const FEATURE_DIM: usize = 7;

/// `[mean_valence, mean_intensity, normalized_duration, joy, sadness, anger, fear]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternFeatures(pub [f64; FEATURE_DIM]);

impl PatternFeatures {
    pub fn mean_valence(&self) -> f64 {
        self.0[0]
    }
}

impl AsRef<[f64]> for PatternFeatures {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn featurize_pattern(pattern: &MoodPattern, window_len: usize) -> Result<PatternFeatures> {
    if window_len == 0 {
        return Err(Error::InvalidArgument("window_len must be positive".into()));
    }
    if pattern.duration > window_len {
        return Err(Error::InvalidArgument(format!(
            "pattern duration {} exceeds window {window_len}",
            pattern.duration
        )));
    }
    let signed = match pattern.band {
        Band::Positive => pattern.mean_intensity,
        Band::Negative => -pattern.mean_intensity,
        Band::Neutral => 0.0,
    };
    let [joy, sadness, anger, fear] = pattern.emotion_fractions;
    Ok(PatternFeatures([
        signed,
        pattern.mean_intensity,
        pattern.duration as f64 / window_len as f64,
        joy,
        sadness,
        anger,
        fear,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::Emotion;

    fn pattern(band: Band, intensity: f64, duration: usize, fractions: [f64; 4]) -> MoodPattern {
        MoodPattern {
            speaker_id: "h0".into(),
            band,
            start_step: 0,
            end_step: duration as u64 - 1,
            mean_intensity: intensity,
            duration,
            dominant_emotion: Emotion::Neutral,
            emotion_fractions: fractions,
            refined: false,
        }
    }

    #[test]
    fn examples() {
        let f = featurize_pattern(&pattern(Band::Neutral, 0.0, 3, [0.0; 4]), 10).unwrap();
        assert_eq!(f.0, [0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0]);
        let f = featurize_pattern(&pattern(Band::Negative, 0.6, 5, [0.0, 0.0, 1.0, 0.0]), 10).unwrap();
        assert_eq!(f.0, [-0.6, 0.6, 0.5, 0.0, 0.0, 1.0, 0.0]);
        let f = featurize_pattern(&pattern(Band::Positive, 0.8, 10, [1.0, 0.0, 0.0, 0.0]), 10).unwrap();
        assert_eq!(f.0, [0.8, 0.8, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_window_rejected() {
        assert!(featurize_pattern(&pattern(Band::Neutral, 0.0, 3, [0.0; 4]), 0).is_err());
        assert!(featurize_pattern(&pattern(Band::Neutral, 0.0, 3, [0.0; 4]), 2).is_err());
    }
}
