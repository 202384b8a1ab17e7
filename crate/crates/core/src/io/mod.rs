//! Scenario files, transcripts, and run outputs.

mod ab;
mod config;
mod metrics;
mod transcript;

pub use ab::{run_ab, sign_test_p, AbReport, AbRow};
pub use config::{
    parse_scenario, parse_scenario_str, ClusteringConfig, ContagionConfig, InitialValences, Openness,
    OrchestrationConfig, PerEntity, ScenarioConfig, SensingConfig, UniformRange, DEFAULT_DT, DEFAULT_EXPRESSIVENESS,
    DEFAULT_OPENNESS, DEFAULT_P_SPEAK, DEFAULT_SENSING_WINDOW, DEFAULT_SUSCEPTIBILITY,
};
pub use metrics::{
    convergence_index, emit_metrics, metrics_csv, summarize_steps, time_to_recovery, EmittedFiles, Summary,
    METRICS_HEADER, VARIANCE_FLOOR,
};
pub use transcript::{
    analyze_transcript, ingest_transcript, parse_transcript, AnalysisParams, SpeakerPatterns, TranscriptReport,
    ANALYSIS_SEED,
};
