//! Optional HTTP text generator. Any failure falls back to templates.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::affect::{Band, Emotion};
use crate::observation::{preprocess, score_sentiment, Lexicon};
use crate::orchestration::StrategyName;

pub const DEFAULT_TIMEOUT_MS: u64 = 5000;
pub const DEFAULT_MAX_TOKENS: u32 = 64;
/// Generated text is rejected when its sensed valence is further than this from nominal.
pub const MAX_VALENCE_DEVIATION: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// Passed through verbatim on every request.
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
}

fn default_timeout_ms() -> u64 {
    DEFAULT_TIMEOUT_MS
}

fn default_max_tokens() -> u32 {
    DEFAULT_MAX_TOKENS
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            enabled: false,
            endpoint: None,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            max_tokens: DEFAULT_MAX_TOKENS,
            headers: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub strategy: StrategyName,
    pub group_class: Band,
    pub dominant_emotion: Emotion,
    pub target_recent_text: String,
    pub max_tokens: u32,
}

#[derive(Debug, Deserialize)]
struct GenerationResponse {
    text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fallback {
    Disabled,
    Transport(String),
    OffValence { text: String, score: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Text(String),
    Fallback(Fallback),
}

/// Posts `request` to the configured endpoint and vets the reply's valence.
pub fn call_external_generator(
    request: &GenerationRequest,
    config: &GeneratorConfig,
    nominal_valence: f64,
    lexicon: &Lexicon,
) -> Generated {
    let endpoint = match (&config.endpoint, config.enabled) {
        (Some(e), true) => e,
        _ => return Generated::Fallback(Fallback::Disabled),
    };
    let text = match post(endpoint, request, config) {
        Ok(t) => t,
        Err(msg) => {
            log::warn!("external generator failed, using template: {msg}");
            return Generated::Fallback(Fallback::Transport(msg));
        }
    };
    let score = score_sentiment(&preprocess(&text), lexicon);
    if (score - nominal_valence).abs() > MAX_VALENCE_DEVIATION {
        log::warn!(
            "external generator text scored {score:.3} against nominal {nominal_valence:.3} for {}, using template",
            request.strategy
        );
        return Generated::Fallback(Fallback::OffValence { text, score });
    }
    Generated::Text(text)
}

fn post(endpoint: &str, request: &GenerationRequest, config: &GeneratorConfig) -> Result<String, String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
        .build()
        .into();
    let mut req = agent.post(endpoint);
    for (k, v) in &config.headers {
        req = req.header(k.as_str(), v.as_str());
    }
    let mut resp = req.send_json(request).map_err(|e| e.to_string())?;
    let body: GenerationResponse = resp.body_mut().read_json().map_err(|e| e.to_string())?;
    Ok(body.text)
}
