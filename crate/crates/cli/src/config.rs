//! Run configuration: one TOML (or JSON) file, overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use memecomm::cascade::{CascadeParams, EnsembleConfig, Model};
use memecomm::community::Detector;
use memecomm::graph::{BuildMode, InteractionKind};
use memecomm::metrics::{DEFAULT_EARLY_STAGE, NEW_MEME_THRESHOLD};
use memecomm::predictor::{EvalConfig, ForestParams, LabelMode};
use memecomm::synthgen::{PlantedCascadeSpec, PlantedPartitionSpec};

use crate::error::usage;
use crate::reproduce::ReproduceConfig;

/// Labels for deriving per-stage seeds from the master seed.
pub mod stage {
    pub const COMMUNITIES: u64 = 1;
    pub const SIMULATE: u64 = 2;
    pub const METRICS: u64 = 3;
    pub const TRAIN: u64 = 4;
    pub const EVAL: u64 = 5;
    pub const SYNTH_NETWORK: u64 = 6;
    pub const SYNTH_CASCADES: u64 = 7;
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every stochastic stage derives its seed from it.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub inputs: Inputs,
    pub ingest: IngestConfig,
    pub communities: CommunityConfig,
    pub simulate: SimulateConfig,
    pub metrics: MetricsConfig,
    pub features: FeaturesConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub synth: SynthConfig,
    pub reproduce: ReproduceConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// Raw follow pairs, tab separated.
    pub edges: Option<PathBuf>,
    /// Tweets, one JSON object per line.
    pub tweets: Option<PathBuf>,
    /// Tweets from the period before `tweets`, for the new-meme filter.
    pub history: Option<PathBuf>,
    /// Undirected network as written by `ingest` or `synth`.
    pub network: Option<PathBuf>,
    pub partition: Option<PathBuf>,
    pub traces: Option<PathBuf>,
    pub interactions: Option<PathBuf>,
    pub features: Option<PathBuf>,
}

impl Inputs {
    fn all(&self) -> [(&'static str, &Option<PathBuf>); 8] {
        [
            ("edges", &self.edges),
            ("tweets", &self.tweets),
            ("history", &self.history),
            ("network", &self.network),
            ("partition", &self.partition),
            ("traces", &self.traces),
            ("interactions", &self.interactions),
            ("features", &self.features),
        ]
    }

    /// Every referenced path must exist.
    pub fn check_exist(&self) -> Result<()> {
        for (name, path) in self.all() {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(usage(format!("input `{name}` does not exist: {}", p.display())));
                }
            }
        }
        Ok(())
    }
}

/// A required input, or a usage error naming its flag.
pub fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| usage(format!("missing input: pass --{flag} or set inputs.{flag} in the config")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub build_mode: BuildMode,
    /// Memes with at least this many history tweets are not new and are dropped.
    pub new_meme_threshold: usize,
    /// Abort when more than this share of tweet lines fails to parse.
    pub max_unparseable: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            build_mode: BuildMode::Reciprocal,
            new_meme_threshold: NEW_MEME_THRESHOLD,
            max_unparseable: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunityConfig {
    pub algorithm: Detector,
    /// Louvain only.
    pub resolution: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        Self {
            algorithm: Detector::Louvain,
            resolution: 1.0,
        }
    }
}

/// A diffusion model named as on the command line (`m1-tweets`, `m2`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelChoice(pub Model);

impl Default for ModelChoice {
    fn default() -> Self {
        Self(Model::M2)
    }
}

impl Serialize for ModelChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.name().to_ascii_lowercase())
    }
}

impl<'de> Deserialize<'de> for ModelChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(ModelChoice).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelChoice,
    pub cascade: CascadeParams,
    pub ensemble: EnsembleConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub early_n: usize,
    /// Traces shorter than this are rejected.
    pub min_trace_len: usize,
    /// Sampling parameters of the M1 reference ensembles.
    pub baseline: CascadeParams,
    pub ensemble: EnsembleConfig,
    /// Restrict the communication-flow analysis to one interaction kind.
    pub flow_kind: Option<InteractionKind>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            early_n: DEFAULT_EARLY_STAGE,
            min_trace_len: 2,
            baseline: CascadeParams::default(),
            ensemble: EnsembleConfig::default(),
            flow_kind: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub early_n: usize,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        Self {
            early_n: DEFAULT_EARLY_STAGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub theta: f64,
    pub mode: LabelMode,
    pub min_tweets: usize,
    pub forest: ForestParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            theta: 90.0,
            mode: LabelMode::Users,
            min_tweets: 50,
            forest: ForestParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub network: PlantedPartitionSpec,
    pub cascades: PlantedCascadeSpec,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            network: PlantedPartitionSpec {
                degree_spread: 1.5,
                ..Default::default()
            },
            cascades: PlantedCascadeSpec::default(),
        }
    }
}

impl RunConfig {
    /// Parse a config file; `.json` files are JSON, anything else TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| usage("a master seed is required: pass --seed or set `seed` in the config"))
    }
}

/// SHA-256 of the compact JSON form of `value`. Object keys serialize in
/// sorted order, so equal configs hash equally.
pub fn canonical_sha256(value: &serde_json::Value) -> String {
    let text = serde_json::to_string(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}
