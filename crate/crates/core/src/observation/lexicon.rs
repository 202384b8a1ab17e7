use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::affect::Emotion;
use crate::error::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../../data/default.lexicon");

/// Token-level affect dictionary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    valence: HashMap<String, f64>,
    emotion: HashMap<String, (Emotion, f64)>,
    negators: HashSet<String>,
    intensifiers: HashMap<String, f64>,
}

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn builtin() -> Lexicon {
        Lexicon::parse(DEFAULT_LEXICON).expect("builtin lexicon is well formed")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Lexicon> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse(&text)
    }

    /// Parses the tab-separated format: `token<TAB>kind<TAB>value[<TAB>category]`.
    pub fn parse(text: &str) -> Result<Lexicon> {
        let mut lex = Lexicon::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            let err = |message: String| Error::Parse { line, message };
            if fields.len() < 2 {
                return Err(err(format!("expected at least 2 tab-separated fields, got {}", fields.len())));
            }
            let token = fields[0].trim().to_lowercase();
            if token.is_empty() {
                return Err(err("empty token".into()));
            }
            let value = |required: bool| -> Result<Option<f64>> {
                match fields.get(2) {
                    Some(v) => v
                        .trim()
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| err(format!("bad numeric value `{v}`"))),
                    None if required => Err(err("missing value".into())),
                    None => Ok(None),
                }
            };
            match fields[1].trim() {
                "val" => {
                    let v = value(true)?.unwrap();
                    lex.insert_valence(&token, v).map_err(|e| err(e.to_string()))?;
                }
                "emo" => {
                    let w = value(true)?.unwrap();
                    let category: Emotion = fields
                        .get(3)
                        .ok_or_else(|| err("emo entry needs a category".into()))?
                        .trim()
                        .parse()
                        .map_err(|e: Error| err(e.to_string()))?;
                    lex.insert_emotion(&token, category, w).map_err(|e| err(e.to_string()))?;
                }
                "neg" => {
                    value(false)?;
                    lex.negators.insert(token);
                }
                "int" => {
                    let m = value(true)?.unwrap();
                    lex.insert_intensifier(&token, m).map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown entry kind `{other}`"))),
            }
            if fields.len() > 4 {
                return Err(err("too many fields".into()));
            }
        }
        Ok(lex)
    }

    pub fn insert_valence(&mut self, token: &str, weight: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!("valence {weight} for `{token}` outside [-1,1]")));
        }
        self.valence.insert(token.to_string(), weight);
        Ok(())
    }

    pub fn insert_emotion(&mut self, token: &str, category: Emotion, weight: f64) -> Result<()> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidArgument(format!("emotion weight {weight} for `{token}` outside (0,1]")));
        }
        if category == Emotion::Neutral {
            return Err(Error::InvalidArgument(format!("`{token}` cannot carry the neutral category")));
        }
        self.emotion.insert(token.to_string(), (category, weight));
        Ok(())
    }

    pub fn insert_negator(&mut self, token: &str) {
        self.negators.insert(token.to_string());
    }

    pub fn insert_intensifier(&mut self, token: &str, multiplier: f64) -> Result<()> {
        if multiplier.is_nan() || multiplier <= 1.0 {
            return Err(Error::InvalidArgument(format!("intensifier `{token}` needs a multiplier > 1")));
        }
        self.intensifiers.insert(token.to_string(), multiplier);
        Ok(())
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valence.get(token).copied()
    }

    pub fn emotion(&self, token: &str) -> Option<(Emotion, f64)> {
        self.emotion.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn intensifier(&self, token: &str) -> Option<f64> {
        self.intensifiers.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.valence.len() + self.emotion.len() + self.negators.len() + self.intensifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_mandated_entries() {
        let lex = Lexicon::builtin();
        for (tok, v) in [
            ("love", 0.8),
            ("great", 0.7),
            ("thanks", 0.5),
            ("hate", -0.8),
            ("terrible", -0.8),
            ("awful", -0.7),
            ("sad", -0.6),
            ("angry", -0.7),
            ("scared", -0.6),
            ("happy", 0.7),
        ] {
            assert_eq!(lex.valence(tok), Some(v), "{tok}");
        }
        assert_eq!(lex.emotion("sad"), Some((Emotion::Sadness, 0.8)));
        assert_eq!(lex.emotion("angry"), Some((Emotion::Anger, 0.9)));
        assert_eq!(lex.emotion("scared"), Some((Emotion::Fear, 0.9)));
        assert_eq!(lex.emotion("happy"), Some((Emotion::Joy, 0.9)));
        for neg in ["not", "never", "no"] {
            assert!(lex.is_negator(neg));
        }
        assert_eq!(lex.intensifier("very"), Some(1.5));
        assert_eq!(lex.intensifier("really"), Some(1.3));
        // "so" must stay neutral filler
        assert_eq!(lex.intensifier("so"), None);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let lex = Lexicon::parse("# hi\n\nfoo\tval\t0.5\nbar\tneg\n").unwrap();
        assert_eq!(lex.valence("foo"), Some(0.5));
        assert!(lex.is_negator("bar"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Lexicon::parse("ok\tval\t0.1\nbad\tval\tnope\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Lexicon::parse("x\tval\t1.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Lexicon::parse("x\tint\t0.9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Lexicon::parse("x\temo\t0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Lexicon::parse("x\twhat\t0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
