use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::affect::Temperament;
use crate::error::{Error, Result};
use crate::grouping::{DEFAULT_K, DEFAULT_MIN_CLUSTER_WEIGHT};
use crate::observation::{Lexicon, DEFAULT_EWMA_ALPHA, DEFAULT_MIN_PATTERN_LEN};
use crate::orchestration::{
    DEFAULT_BUDGET, DEFAULT_COOLDOWN, DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_EPSILON_EXPLORE, DEFAULT_HORIZON,
};
use crate::response::{GeneratorConfig, DEFAULT_TIMEOUT_MS};
use crate::sim::{TopologyKind, DEFAULT_DECAY};

pub const DEFAULT_EXPRESSIVENESS: f64 = 0.5;
pub const DEFAULT_SUSCEPTIBILITY: f64 = 0.8;
pub const DEFAULT_OPENNESS: f64 = 1.0;
pub const DEFAULT_DT: f64 = 0.5;
pub const DEFAULT_P_SPEAK: f64 = 0.8;
pub const DEFAULT_SENSING_WINDOW: usize = 10;

/// A scalar applied to every entity, or one value per entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerEntity {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerEntity {
    pub fn expand(&self, n: usize) -> Vec<f64> {
        match self {
            PerEntity::Scalar(v) => vec![*v; n],
            PerEntity::List(v) => v.clone(),
        }
    }

    fn check(&self, path: &str, n: usize, lo: f64, hi: f64) -> Result<()> {
        if let PerEntity::List(v) = self {
            if v.len() != n {
                return Err(Error::config(path, format!("expected {n} values, got {}", v.len())));
            }
        }
        for (i, x) in self.expand(n).iter().enumerate() {
            if !(lo..=hi).contains(x) {
                let at = match self {
                    PerEntity::Scalar(_) => path.to_string(),
                    PerEntity::List(_) => format!("{path}[{i}]"),
                };
                return Err(Error::config(at, format!("{x} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Openness over all entities (humans first, then agents), row = sender.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Openness {
    /// Every directed pair between distinct entities.
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

impl Openness {
    pub fn expand(&self, n: usize) -> Vec<Vec<f64>> {
        match self {
            Openness::Scalar(a) => (0..n)
                .map(|s| (0..n).map(|r| if s == r { 0.0 } else { *a }).collect())
                .collect(),
            Openness::Matrix(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformRange {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialValences {
    List(Vec<f64>),
    Distribution { uniform: UniformRange },
}

impl Default for InitialValences {
    fn default() -> Self {
        InitialValences::Distribution {
            uniform: UniformRange { low: -0.3, high: 0.3 },
        }
    }
}

impl InitialValences {
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self {
            InitialValences::List(v) => v.clone(),
            InitialValences::Distribution { uniform } if uniform.low == uniform.high => vec![uniform.low; n],
            InitialValences::Distribution { uniform } => {
                (0..n).map(|_| rng.random_range(uniform.low..=uniform.high)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContagionConfig {
    /// Per human; agents express with their strategy's expressiveness.
    pub expressiveness: PerEntity,
    /// Per human.
    pub susceptibility: PerEntity,
    pub openness: Openness,
    pub dt: f64,
    pub decay: f64,
    /// Messages express the sender's hidden valence (humans) or nominal
    /// strategy valence (agents) instead of their sensed text score.
    pub exact_expression: bool,
}

impl Default for ContagionConfig {
    fn default() -> Self {
        ContagionConfig {
            expressiveness: PerEntity::Scalar(DEFAULT_EXPRESSIVENESS),
            susceptibility: PerEntity::Scalar(DEFAULT_SUSCEPTIBILITY),
            openness: Openness::Scalar(DEFAULT_OPENNESS),
            dt: DEFAULT_DT,
            decay: DEFAULT_DECAY,
            exact_expression: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrchestrationConfig {
    pub enabled: bool,
    pub divergence_threshold: f64,
    pub cooldown: u64,
    pub budget: usize,
    pub epsilon_explore: f64,
    pub horizon: usize,
    /// Let the bandit choose among decision-tree alternatives.
    pub optimizer: bool,
}

impl Default for OrchestrationConfig {
    fn default() -> Self {
        OrchestrationConfig {
            enabled: true,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            cooldown: DEFAULT_COOLDOWN,
            budget: DEFAULT_BUDGET,
            epsilon_explore: DEFAULT_EPSILON_EXPLORE,
            horizon: DEFAULT_HORIZON,
            optimizer: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusteringConfig {
    pub k: usize,
    pub min_cluster_weight: f64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            k: DEFAULT_K,
            min_cluster_weight: DEFAULT_MIN_CLUSTER_WEIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensingConfig {
    pub ewma_alpha: f64,
    pub min_pattern_len: usize,
    /// Samples per human each agent keeps for pattern segmentation.
    pub window: usize,
    /// Resolved against the scenario file's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
}

impl Default for SensingConfig {
    fn default() -> Self {
        SensingConfig {
            ewma_alpha: DEFAULT_EWMA_ALPHA,
            min_pattern_len: DEFAULT_MIN_PATTERN_LEN,
            window: DEFAULT_SENSING_WINDOW,
            lexicon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: TopologyKind,
    pub n_humans: usize,
    pub n_agents: usize,
    pub steps: u64,
    pub seed: u64,
    #[serde(default)]
    pub contagion: ContagionConfig,
    #[serde(default)]
    pub initial_valences: InitialValences,
    #[serde(default = "default_p_speak")]
    pub p_speak: PerEntity,
    /// Defaults to cycling sad-, anger-, fear-leaning by human index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperaments: Option<Vec<Temperament>>,
    #[serde(default)]
    pub orchestration: OrchestrationConfig,
    #[serde(default)]
    pub clustering: ClusteringConfig,
    #[serde(default)]
    pub sensing: SensingConfig,
    #[serde(default)]
    pub generator: GeneratorConfig,
}

fn default_p_speak() -> PerEntity {
    PerEntity::Scalar(DEFAULT_P_SPEAK)
}

/// Parses a scenario file. Relative lexicon paths resolve against its directory.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario_str(&text, base)
}

pub fn parse_scenario_str(json: &str, base_dir: &Path) -> Result<ScenarioConfig> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let mut config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().to_string())
    })?;
    if let Some(lex) = &config.sensing.lexicon {
        config.sensing.lexicon = Some(base_dir.join(lex));
    }
    config.validate()?;
    Ok(config)
}

impl ScenarioConfig {
    /// A config with every optional section at its default.
    pub fn minimal(topology: TopologyKind, n_humans: usize, n_agents: usize, steps: u64, seed: u64) -> Self {
        ScenarioConfig {
            topology,
            n_humans,
            n_agents,
            steps,
            seed,
            contagion: ContagionConfig::default(),
            initial_valences: InitialValences::default(),
            p_speak: default_p_speak(),
            temperaments: None,
            orchestration: OrchestrationConfig::default(),
            clustering: ClusteringConfig::default(),
            sensing: SensingConfig::default(),
            generator: GeneratorConfig::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn entity_count(&self) -> usize {
        self.n_humans + self.n_agents
    }

    pub fn temperament(&self, human: usize) -> Temperament {
        match &self.temperaments {
            Some(t) => t[human],
            None => Temperament::ALL[human % Temperament::ALL.len()],
        }
    }

    pub fn load_lexicon(&self) -> Result<Lexicon> {
        match &self.sensing.lexicon {
            Some(p) => Lexicon::from_file(p),
            None => Ok(Lexicon::builtin()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (nh, n) = (self.n_humans, self.entity_count());
        self.topology
            .check_cardinality(self.n_humans, self.n_agents)
            .map_err(|m| Error::config("n_agents", m))?;
        if self.steps == 0 {
            return Err(Error::config("steps", "must be positive"));
        }

        let c = &self.contagion;
        c.expressiveness.check("contagion.expressiveness", nh, 0.0, 1.0)?;
        c.susceptibility.check("contagion.susceptibility", nh, 0.0, 1.0)?;
        match &c.openness {
            Openness::Scalar(a) if !(0.0..=1.0).contains(a) => {
                return Err(Error::config("contagion.openness", format!("{a} outside [0, 1]")));
            }
            Openness::Matrix(m) => {
                if m.len() != n || m.iter().any(|r| r.len() != n) {
                    return Err(Error::config(
                        "contagion.openness",
                        format!("matrix must be {n}x{n} over humans then agents"),
                    ));
                }
                for (s, row) in m.iter().enumerate() {
                    for (r, a) in row.iter().enumerate() {
                        if !(0.0..=1.0).contains(a) {
                            return Err(Error::config(format!("contagion.openness[{s}][{r}]"), format!("{a} outside [0, 1]")));
                        }
                    }
                }
            }
            _ => {}
        }
        if !(c.dt > 0.0 && c.dt <= 1.0) {
            return Err(Error::config("contagion.dt", format!("{} outside (0, 1]", c.dt)));
        }
        if !(0.0..=1.0).contains(&c.decay) {
            return Err(Error::config("contagion.decay", format!("{} outside [0, 1]", c.decay)));
        }

        match &self.initial_valences {
            InitialValences::List(v) => PerEntity::List(v.clone()).check("initial_valences", nh, -1.0, 1.0)?,
            InitialValences::Distribution { uniform } => {
                let ok = (-1.0..=1.0).contains(&uniform.low)
                    && (-1.0..=1.0).contains(&uniform.high)
                    && uniform.low <= uniform.high;
                if !ok {
                    return Err(Error::config(
                        "initial_valences.uniform",
                        "need -1 <= low <= high <= 1",
                    ));
                }
            }
        }
        self.p_speak.check("p_speak", nh, 0.0, 1.0)?;
        if let Some(t) = &self.temperaments {
            if t.len() != nh {
                return Err(Error::config("temperaments", format!("expected {nh} values, got {}", t.len())));
            }
        }

        let o = &self.orchestration;
        if !(0.0..=1.0).contains(&o.divergence_threshold) {
            return Err(Error::config("orchestration.divergence_threshold", "outside [0, 1]"));
        }
        if o.cooldown == 0 {
            return Err(Error::config("orchestration.cooldown", "must be positive"));
        }
        if o.budget == 0 {
            return Err(Error::config("orchestration.budget", "must be positive"));
        }
        if !(0.0..=1.0).contains(&o.epsilon_explore) {
            return Err(Error::config("orchestration.epsilon_explore", "outside [0, 1]"));
        }
        if o.horizon == 0 {
            return Err(Error::config("orchestration.horizon", "must be positive"));
        }

        if self.clustering.k == 0 {
            return Err(Error::config("clustering.k", "must be positive"));
        }
        if self.clustering.min_cluster_weight.is_nan() || self.clustering.min_cluster_weight < 0.0 {
            return Err(Error::config("clustering.min_cluster_weight", "must be >= 0"));
        }

        let s = &self.sensing;
        if !(s.ewma_alpha > 0.0 && s.ewma_alpha <= 1.0) {
            return Err(Error::config("sensing.ewma_alpha", format!("{} outside (0, 1]", s.ewma_alpha)));
        }
        if s.min_pattern_len == 0 {
            return Err(Error::config("sensing.min_pattern_len", "must be positive"));
        }
        if s.window < s.min_pattern_len {
            return Err(Error::config("sensing.window", "must be at least min_pattern_len"));
        }
        if let Some(p) = &s.lexicon {
            if !p.is_file() {
                return Err(Error::config("sensing.lexicon", format!("{} does not exist", p.display())));
            }
        }

        let g = &self.generator;
        if g.enabled && g.endpoint.is_none() {
            return Err(Error::config("generator.endpoint", "required when the generator is enabled"));
        }
        if g.timeout_ms == 0 || g.timeout_ms > DEFAULT_TIMEOUT_MS {
            return Err(Error::config(
                "generator.timeout_ms",
                format!("must be in 1..={DEFAULT_TIMEOUT_MS}"),
            ));
        }
        Ok(())
    }
}
