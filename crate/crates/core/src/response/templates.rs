use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::affect::{Channel, SpeakerKind, Utterance};
use crate::error::{Error, Result};
use crate::orchestration::{InterventionPlan, StrategyName};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplatePattern {
    /// Text with `{target_name}` and `{dominant_emotion}` slots.
    pub text: String,
    pub nominal_valence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTemplate {
    pub strategy: StrategyName,
    pub patterns: Vec<TemplatePattern>,
}

/// Response templates keyed by strategy.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemplateBank {
    templates: BTreeMap<StrategyName, ResponseTemplate>,
}

const BUILTIN: &[(StrategyName, &[&str])] = &[
    (
        StrategyName::Uplift,
        &[
            "{target_name}, you are doing great and this is really good work",
            "hey {target_name}, glad you are here, this group is great",
            "{target_name}, good news: we are making great progress together",
            "love the energy here {target_name}, really great stuff",
        ],
    ),
    (
        StrategyName::EngageHumor,
        &[
            "{target_name}, fun fact: even the coffee machine needs a break. laugh a little",
            "okay {target_name}, time for a funny pause and a smile",
            "{target_name}, this calls for a cool joke and a good laugh",
        ],
    ),
    (
        StrategyName::Mirror,
        &[
            "{target_name}, glad to feel this good mood too",
            "same here {target_name}, this is nice and fun",
            "{target_name}, good vibes all around, enjoy it",
        ],
    ),
    (
        StrategyName::DeEscalate,
        &[
            "{target_name}, let us take a breath and stay calm together",
            "i hear the {dominant_emotion}, {target_name}. let us relax and sort it out",
            "okay {target_name}, one step at a time, we can keep this steady",
        ],
    ),
    (
        StrategyName::Reassure,
        &[
            "{target_name}, you are safe here and we will figure it out",
            "it is okay to feel {dominant_emotion}, {target_name}. there is hope",
            "{target_name}, we have a steady plan and things will get better",
        ],
    ),
    (
        StrategyName::EmpathizeUplift,
        &[
            "that sounds hard, {target_name}. we are with you and things can get better",
            "{target_name}, your feelings make sense. there is hope and we appreciate you",
            "thanks for sharing, {target_name}. calm days will come",
        ],
    ),
];

impl TemplateBank {
    pub fn builtin() -> Self {
        let mut bank = TemplateBank::default();
        for &(strategy, texts) in BUILTIN {
            let nominal = strategy.strategy().expressed_valence;
            bank.insert(ResponseTemplate {
                strategy,
                patterns: texts
                    .iter()
                    .map(|t| TemplatePattern {
                        text: t.to_string(),
                        nominal_valence: nominal,
                    })
                    .collect(),
            });
        }
        bank
    }

    pub fn insert(&mut self, template: ResponseTemplate) {
        self.templates.insert(template.strategy, template);
    }

    pub fn get(&self, strategy: StrategyName) -> Option<&ResponseTemplate> {
        self.templates.get(&strategy)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ResponseTemplate> {
        self.templates.values()
    }
}

pub fn fill_slots(pattern: &str, target_name: &str, dominant_emotion: &str) -> String {
    pattern
        .replace("{target_name}", target_name)
        .replace("{dominant_emotion}", dominant_emotion)
}

/// Renders the plan's message from a uniformly chosen pattern of its strategy.
pub fn render_response<R: Rng + ?Sized>(
    plan: &InterventionPlan,
    templates: &TemplateBank,
    channel: Channel,
    rng: &mut R,
) -> Result<Utterance> {
    let template = templates
        .get(plan.strategy.name)
        .filter(|t| !t.patterns.is_empty())
        .ok_or_else(|| Error::config("templates", format!("no templates for strategy `{}`", plan.strategy.name)))?;
    let pattern = if template.patterns.len() == 1 {
        &template.patterns[0]
    } else {
        &template.patterns[rng.random_range(0..template.patterns.len())]
    };
    Ok(Utterance {
        step: plan.step_scheduled,
        speaker_id: plan.agent_id.clone(),
        speaker_kind: SpeakerKind::Agent,
        channel,
        text: fill_slots(
            &pattern.text,
            &plan.target_human_id,
            plan.context_key.dominant_emotion.as_str(),
        ),
    })
}
