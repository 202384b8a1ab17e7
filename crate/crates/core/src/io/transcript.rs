use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::affect::{compare_ids, GroupMoodSnapshot, MoodPattern, MoodSample, SpeakerKind, Utterance};
use crate::error::{Error, Result};
use crate::grouping::{group_moods, GroupingParams, DEFAULT_K, DEFAULT_MIN_CLUSTER_WEIGHT};
use crate::observation::{refine_classification, segment_patterns, sense_text, Ewma, Lexicon};
use crate::observation::{DEFAULT_EWMA_ALPHA, DEFAULT_MIN_PATTERN_LEN};

/// Clustering seed for offline analysis, fixed so reports are reproducible.
pub const ANALYSIS_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerPatterns {
    pub speaker_id: String,
    pub patterns: Vec<MoodPattern>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TranscriptReport {
    pub utterances: usize,
    /// Human speakers in natural id order.
    pub speakers: Vec<SpeakerPatterns>,
    pub snapshot: Option<GroupMoodSnapshot>,
}

impl TranscriptReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub ewma_alpha: f64,
    pub min_pattern_len: usize,
    pub k: usize,
    pub min_cluster_weight: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            ewma_alpha: DEFAULT_EWMA_ALPHA,
            min_pattern_len: DEFAULT_MIN_PATTERN_LEN,
            k: DEFAULT_K,
            min_cluster_weight: DEFAULT_MIN_CLUSTER_WEIGHT,
        }
    }
}

/// Parses JSONL utterances. Blank lines are skipped; line numbers are 1-based.
pub fn parse_transcript(text: &str) -> Result<Vec<Utterance>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let u: Utterance = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        u.validate().map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(u);
    }
    Ok(out)
}

/// Runs sensing and grouping over human utterances. Agent and backchannel
/// lines are accepted but not scored.
pub fn analyze_transcript(utterances: &[Utterance], lexicon: &Lexicon, params: &AnalysisParams) -> Result<TranscriptReport> {
    let mut by_speaker: BTreeMap<&str, Vec<&Utterance>> = BTreeMap::new();
    for u in utterances.iter().filter(|u| u.speaker_kind == SpeakerKind::Human) {
        by_speaker.entry(&u.speaker_id).or_default().push(u);
    }
    let mut speakers: Vec<(&str, Vec<&Utterance>)> = by_speaker.into_iter().collect();
    speakers.sort_by(|a, b| compare_ids(a.0, b.0));

    let mut report = TranscriptReport {
        utterances: utterances.len(),
        ..TranscriptReport::default()
    };
    let mut latest = Vec::new();
    let mut all_patterns = Vec::new();
    for (speaker, mut said) in speakers {
        said.sort_by_key(|u| u.step);
        if let Some(w) = said.windows(2).find(|w| w[0].step == w[1].step) {
            return Err(Error::InvalidArgument(format!("{speaker} speaks twice at step {}", w[0].step)));
        }
        let mut ewma = Ewma::new(params.ewma_alpha);
        let samples: Vec<MoodSample> = said
            .iter()
            .map(|u| {
                let emotion = sense_text(&u.text, lexicon);
                MoodSample {
                    step: u.step,
                    speaker_id: speaker.to_string(),
                    ewma_valence: ewma.update(emotion.valence),
                    emotion,
                }
            })
            .collect();
        latest.push(samples.last().map_or(0.0, |s| s.ewma_valence));
        let context: Vec<Utterance> = said.iter().map(|u| (*u).clone()).collect();
        let patterns: Vec<MoodPattern> = segment_patterns(&samples, params.ewma_alpha, params.min_pattern_len)?
            .iter()
            .map(|p| refine_classification(p, &context))
            .collect();
        all_patterns.extend(patterns.iter().cloned());
        report.speakers.push(SpeakerPatterns {
            speaker_id: speaker.to_string(),
            patterns,
        });
    }

    let window_len = report
        .speakers
        .iter()
        .flat_map(|s| &s.patterns)
        .map(|p| p.duration)
        .max()
        .unwrap_or(1);
    let last_step = utterances.iter().map(|u| u.step).max().unwrap_or(0);
    let grouping = GroupingParams {
        k: params.k,
        min_cluster_weight: params.min_cluster_weight,
        window_len,
    };
    report.snapshot = group_moods(last_step, &all_patterns, &latest, &grouping, ANALYSIS_SEED)?;
    Ok(report)
}

pub fn ingest_transcript(path: impl AsRef<Path>, lexicon: &Lexicon) -> Result<TranscriptReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    analyze_transcript(&parse_transcript(&text)?, lexicon, &AnalysisParams::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::Band;

    fn line(t: u64, speaker: &str, text: &str) -> String {
        format!(r#"{{"t": {t}, "speaker_id": "{speaker}", "speaker_kind": "human", "channel": "medium", "text": "{text}"}}"#)
    }

    #[test]
    fn empty_is_empty_report() {
        let r = analyze_transcript(&parse_transcript("").unwrap(), &Lexicon::builtin(), &AnalysisParams::default()).unwrap();
        assert_eq!(r, TranscriptReport::default());
    }

    #[test]
    fn bad_line_reports_line_number() {
        let text = format!("{}\n{}\nnot json\n", line(0, "h0", "hi"), line(1, "h0", "hi"));
        match parse_transcript(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let text = r#"{"t": 0, "speaker_id": "h0", "speaker_kind": "human", "channel": "backchannel", "text": "x"}"#;
        assert!(matches!(parse_transcript(text), Err(Error::Parse { line: 1, .. })));
        let text = r#"{"t": 0, "speaker_id": "h0", "speaker_kind": "human", "channel": "medium", "text": "x", "mood": 1}"#;
        assert!(matches!(parse_transcript(text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn six_loves_is_positive() {
        let text: String = (0..6).map(|t| line(t, "h0", "i love this") + "\n").collect();
        let r = analyze_transcript(&parse_transcript(&text).unwrap(), &Lexicon::builtin(), &AnalysisParams::default()).unwrap();
        assert_eq!(r.speakers.len(), 1);
        let p = &r.speakers[0].patterns;
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].band, Band::Positive);
        assert_eq!(p[0].duration, 6);
        assert_eq!(r.snapshot.unwrap().group_class, Band::Positive);
    }

    #[test]
    fn sustained_negative_speaker_diverges() {
        let mut text = String::new();
        for t in 0..5 {
            text += &(line(t, "h0", "i love this") + "\n");
            text += &(line(t, "h1", "this is terrible") + "\n");
        }
        let r = analyze_transcript(&parse_transcript(&text).unwrap(), &Lexicon::builtin(), &AnalysisParams::default()).unwrap();
        let snap = r.snapshot.unwrap();
        // latest ewma is exactly +0.8 and -0.8, population variance 0.64
        assert!((snap.divergence - 0.64).abs() < 1e-12);
        assert_eq!(r.speakers[1].patterns[0].band, Band::Negative);
    }

    #[test]
    fn repeated_step_rejected() {
        let text = format!("{}\n{}\n", line(2, "h0", "hi"), line(2, "h0", "again"));
        let err = analyze_transcript(&parse_transcript(&text).unwrap(), &Lexicon::builtin(), &AnalysisParams::default());
        assert!(err.is_err());
    }
}
