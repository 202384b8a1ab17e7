//! Per-speaker affect sensing: text preprocessing, lexicon sentiment and
//! emotion scoring, mood-pattern segmentation and rule-based refinement.

mod lexicon;
mod patterns;
mod text;

pub use lexicon::Lexicon;
pub use patterns::{
    refine_classification, segment_patterns, smooth, Ewma, DEFAULT_EWMA_ALPHA, DEFAULT_MIN_PATTERN_LEN,
};
pub use text::{detect_emotions, preprocess, score_sentiment, sense_text, INTENSIFIER_WINDOW, NEGATION_WINDOW};
