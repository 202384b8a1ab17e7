use crate::affect::{argmax_first, Band, Emotion, MoodPattern, MoodSample, Utterance};
use crate::error::{Error, Result};

pub const DEFAULT_EWMA_ALPHA: f64 = 0.3;
pub const DEFAULT_MIN_PATTERN_LEN: usize = 3;

/// Share of question utterances at or above which a positive pattern is demoted.
const QUESTION_SHARE: f64 = 0.5;
/// Dominant-emotion fraction below which the dominant emotion is reset to neutral.
const MIN_DOMINANT_FRACTION: f64 = 0.4;

/// Running exponentially weighted valence for one speaker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ewma {
    alpha: f64,
    value: Option<f64>,
}

impl Ewma {
    pub fn new(alpha: f64) -> Self {
        Ewma { alpha, value: None }
    }

    pub fn update(&mut self, x: f64) -> f64 {
        let next = match self.value {
            None => x,
            Some(prev) => self.alpha * x + (1.0 - self.alpha) * prev,
        };
        self.value = Some(next);
        next
    }

    pub fn value(&self) -> Option<f64> {
        self.value
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("ewma alpha {alpha} outside (0,1]")))
    }
}

/// Recomputes `ewma_valence` over the sequence from each sample's emotion valence.
pub fn smooth(samples: &[MoodSample], alpha: f64) -> Result<Vec<MoodSample>> {
    check_alpha(alpha)?;
    let mut ewma = Ewma::new(alpha);
    Ok(samples
        .iter()
        .map(|s| MoodSample {
            ewma_valence: ewma.update(s.emotion.valence),
            ..s.clone()
        })
        .collect())
}

/// Splits one speaker's samples into maximal same-band runs of at least `min_len` samples.
pub fn segment_patterns(samples: &[MoodSample], alpha: f64, min_len: usize) -> Result<Vec<MoodPattern>> {
    if min_len == 0 {
        return Err(Error::InvalidArgument("min_pattern_len must be positive".into()));
    }
    let Some(first) = samples.first() else {
        check_alpha(alpha)?;
        return Ok(Vec::new());
    };
    for pair in samples.windows(2) {
        if pair[1].step <= pair[0].step {
            return Err(Error::InvalidArgument("samples must be strictly increasing in step".into()));
        }
    }
    if samples.iter().any(|s| s.speaker_id != first.speaker_id) {
        return Err(Error::InvalidArgument("samples span more than one speaker".into()));
    }

    let smoothed = smooth(samples, alpha)?;
    let mut patterns = Vec::new();
    let mut start = 0;
    while start < smoothed.len() {
        let band = Band::of(smoothed[start].ewma_valence);
        let mut end = start;
        while end + 1 < smoothed.len() && Band::of(smoothed[end + 1].ewma_valence) == band {
            end += 1;
        }
        let run = &smoothed[start..=end];
        if run.len() >= min_len {
            patterns.push(summarize(run, band));
        }
        start = end + 1;
    }
    Ok(patterns)
}

fn summarize(run: &[MoodSample], band: Band) -> MoodPattern {
    let n = run.len() as f64;
    let mut totals = [0.0f64; 5];
    for s in run {
        for (t, w) in totals.iter_mut().zip(s.emotion.weights()) {
            *t += w;
        }
    }
    let mean_intensity = run.iter().map(|s| s.ewma_valence.abs()).sum::<f64>() / n;
    MoodPattern {
        speaker_id: run[0].speaker_id.clone(),
        band,
        start_step: run[0].step,
        end_step: run[run.len() - 1].step,
        mean_intensity,
        duration: run.len(),
        dominant_emotion: Emotion::ALL[argmax_first(&totals)],
        emotion_fractions: [totals[0] / n, totals[1] / n, totals[2] / n, totals[3] / n],
        refined: false,
    }
}

/// Context rules: question-heavy positive runs drop to neutral, and weak
/// dominant emotions drop to neutral.
pub fn refine_classification(pattern: &MoodPattern, context: &[Utterance]) -> MoodPattern {
    let mut out = pattern.clone();
    let own: Vec<&Utterance> = context
        .iter()
        .filter(|u| {
            u.speaker_id == pattern.speaker_id && u.step >= pattern.start_step && u.step <= pattern.end_step
        })
        .collect();
    if out.band == Band::Positive && !own.is_empty() {
        let questions = own.iter().filter(|u| u.is_question()).count();
        if questions as f64 >= QUESTION_SHARE * own.len() as f64 {
            out.band = Band::Neutral;
            out.refined = true;
        }
    }
    if let Some(frac) = out.dominant_fraction() {
        if frac < MIN_DOMINANT_FRACTION {
            out.dominant_emotion = Emotion::Neutral;
            out.refined = true;
        }
    }
    out
}
