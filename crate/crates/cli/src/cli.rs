//! Command-line surface. Flags override the matching config keys.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use memecomm::cascade::Model;
use memecomm::community::Detector;
use memecomm::graph::BuildMode;
use memecomm::predictor::LabelMode;

use crate::config::{ModelChoice, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "memecomm", version, about = "Meme community concentration and virality prediction")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed (required, here or in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML config; `.json` files are read as JSON.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the network, meme traces and interaction log from raw files.
    Ingest(IngestArgs),
    /// Detect communities.
    Communities(CommunitiesArgs),
    /// Run an ensemble of one baseline diffusion model.
    Simulate(SimulateArgs),
    /// Concentration measures, relative to M1, plus communication flow.
    Metrics(MetricsArgs),
    /// Early-stage prediction features.
    Features(FeaturesArgs),
    /// Train a forest on a features file.
    Train(TrainArgs),
    /// Cross-validated precision/recall grid with both baselines.
    Eval(EvalArgs),
    /// Generate a planted-partition world with planted memes.
    Synth(SynthArgs),
    /// Run the full synthetic reproduction and its acceptance checks.
    Reproduce,
}

fn serde_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: memecomm::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Follow pairs, `u<TAB>v` per line.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Tweets as JSON lines.
    #[arg(long)]
    pub tweets: Option<PathBuf>,
    /// Previous-period tweets for the new-meme filter.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// `reciprocal` or `as-is`.
    #[arg(long, value_parser = serde_enum::<BuildMode>)]
    pub build_mode: Option<BuildMode>,
    #[arg(long)]
    pub new_meme_threshold: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CommunitiesArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// `louvain` or `label-propagation`.
    #[arg(long, value_parser = serde_enum::<Detector>)]
    pub algorithm: Option<Detector>,
    #[arg(long)]
    pub resolution: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Needed for M4 and for the ensemble summary.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// `m1-tweets`, `m1-users`, `m2`, `m3` or `m4`.
    #[arg(long, value_parser = model)]
    pub model: Option<Model>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub target_tweets: Option<usize>,
    #[arg(long)]
    pub n_sims: Option<usize>,
    #[arg(long)]
    pub n_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Enables the communication-flow analysis.
    #[arg(long)]
    pub interactions: Option<PathBuf>,
    #[arg(long)]
    pub early_n: Option<usize>,
    /// Simulations per M1 baseline ensemble.
    #[arg(long)]
    pub n_sims: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Without it the intra-community interaction share is missing.
    #[arg(long)]
    pub interactions: Option<PathBuf>,
    #[arg(long)]
    pub early_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Viral percentile.
    #[arg(long)]
    pub theta: Option<f64>,
    /// `tweets` or `users`.
    #[arg(long, value_parser = serde_enum::<LabelMode>)]
    pub mode: Option<LabelMode>,
    #[arg(long)]
    pub trees: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n_memes: Option<usize>,
}

fn set<T>(slot: &mut T, flag: &Option<T>)
where
    T: Clone,
{
    if let Some(v) = flag {
        *slot = v.clone();
    }
}

fn set_opt<T: Clone>(slot: &mut Option<T>, flag: &Option<T>) {
    if flag.is_some() {
        slot.clone_from(flag);
    }
}

impl Cli {
    /// Fold the flags into `cfg`; flags win.
    pub fn apply(&self, cfg: &mut RunConfig) {
        let g = &self.global;
        set_opt(&mut cfg.seed, &g.seed);
        set_opt(&mut cfg.out, &g.out);
        set_opt(&mut cfg.threads, &g.threads);
        let inputs = &mut cfg.inputs;
        match &self.command {
            Command::Ingest(a) => {
                set_opt(&mut inputs.edges, &a.edges);
                set_opt(&mut inputs.tweets, &a.tweets);
                set_opt(&mut inputs.history, &a.history);
                set(&mut cfg.ingest.build_mode, &a.build_mode);
                set(&mut cfg.ingest.new_meme_threshold, &a.new_meme_threshold);
            }
            Command::Communities(a) => {
                set_opt(&mut inputs.network, &a.network);
                set(&mut cfg.communities.algorithm, &a.algorithm);
                set(&mut cfg.communities.resolution, &a.resolution);
            }
            Command::Simulate(a) => {
                set_opt(&mut inputs.network, &a.network);
                set_opt(&mut inputs.partition, &a.partition);
                set(&mut cfg.simulate.model, &a.model.map(ModelChoice));
                set(&mut cfg.simulate.cascade.p, &a.p);
                set(&mut cfg.simulate.cascade.target_tweets, &a.target_tweets);
                set(&mut cfg.simulate.ensemble.n_sims, &a.n_sims);
                set(&mut cfg.simulate.ensemble.n_samples, &a.n_samples);
            }
            Command::Metrics(a) => {
                set_opt(&mut inputs.network, &a.network);
                set_opt(&mut inputs.partition, &a.partition);
                set_opt(&mut inputs.traces, &a.traces);
                set_opt(&mut inputs.interactions, &a.interactions);
                set(&mut cfg.metrics.early_n, &a.early_n);
                set(&mut cfg.metrics.ensemble.n_sims, &a.n_sims);
            }
            Command::Features(a) => {
                set_opt(&mut inputs.network, &a.network);
                set_opt(&mut inputs.partition, &a.partition);
                set_opt(&mut inputs.traces, &a.traces);
                set_opt(&mut inputs.interactions, &a.interactions);
                set(&mut cfg.features.early_n, &a.early_n);
            }
            Command::Train(a) => {
                set_opt(&mut inputs.features, &a.features);
                set(&mut cfg.train.theta, &a.theta);
                set(&mut cfg.train.mode, &a.mode);
                set(&mut cfg.train.forest.n_trees, &a.trees);
            }
            Command::Eval(a) => {
                set_opt(&mut inputs.features, &a.features);
                set(&mut cfg.eval.folds, &a.folds);
                set(&mut cfg.eval.forest.n_trees, &a.trees);
            }
            Command::Synth(a) => {
                set(&mut cfg.synth.cascades.n_memes, &a.n_memes);
            }
            Command::Reproduce => {}
        }
    }
}
