//! Intervention text: deterministic templates plus an optional external generator.

mod external;
mod templates;

pub use external::{
    call_external_generator, Fallback, GenerationRequest, Generated, GeneratorConfig, DEFAULT_MAX_TOKENS,
    DEFAULT_TIMEOUT_MS, MAX_VALENCE_DEVIATION,
};
pub use templates::{fill_slots, render_response, ResponseTemplate, TemplateBank, TemplatePattern};
