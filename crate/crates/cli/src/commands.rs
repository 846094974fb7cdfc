//! Subcommand implementations. Each one reads its inputs, writes its
//! outputs into the output directory and finishes with the manifest.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use memecomm::cascade::write_traces;
use memecomm::community::{detect_label_propagation, detect_louvain_with, modularity, write_partition, Detector};
use memecomm::graph::io::{write_edge_list, write_interactions};
use memecomm::graph::{DegreeStats, InteractionLog};
use memecomm::metrics::{community_flow, write_reports_csv};
use memecomm::predictor::{
    evaluate, extract_all, nearest_rank_threshold, read_features_csv, train_forest, write_eval_csv,
    write_features_csv, EvalConfig, FeatureRow, ForestParams, LabelMode,
};
use memecomm::rng::derive_seed;
use memecomm::synthgen::{gen_cascades, gen_network, PlantedCascadeSpec, PlantedPartitionSpec};
use memecomm::Error;

use crate::config::{require, stage, RunConfig};
use crate::error::AcceptanceFailure;
use crate::ingest::{ingest, IngestOptions};
use crate::manifest::OutDir;
use crate::pipeline::{concentration_reports, load_log, load_network, load_partition, load_traces, open, write_curves};
use crate::reproduce::{self, write_planted, World};

pub const DEFAULT_OUT: &str = "out";

/// Effective settings shared by every command.
pub struct Ctx {
    pub cfg: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        let seed = cfg.seed()?;
        cfg.inputs.check_exist()?;
        let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        Ok(Self { cfg, seed, out })
    }

    fn config_json<T: Serialize>(&self, section: &str, value: &T) -> Result<serde_json::Value> {
        Ok(json!({ "seed": self.seed, section: serde_json::to_value(value)? }))
    }
}

pub fn ingest_cmd(ctx: &Ctx) -> Result<()> {
    let i = &ctx.cfg.inputs;
    let edges = require(&i.edges, "edges")?;
    let tweets = require(&i.tweets, "tweets")?;
    let c = &ctx.cfg.ingest;
    let opts = IngestOptions {
        build_mode: c.build_mode,
        new_meme_threshold: c.new_meme_threshold,
        max_unparseable: c.max_unparseable,
    };
    let history = i.history.as_deref().map(open).transpose()?;
    let data = ingest(open(edges)?, open(tweets)?, history, &opts).context("ingest")?;
    let ids = data.network.ids();
    let mut out = OutDir::create(&ctx.out)?;
    out.write("network.tsv", |w| Ok(write_edge_list(&data.network, w)?))?;
    out.write("traces.jsonl", |w| Ok(write_traces(&data.traces, ids, w)?))?;
    out.write("interactions.jsonl", |w| Ok(write_interactions(&data.log.to_raw(ids), w)?))?;
    out.write_json("ingest_report.json", &data.report)?;
    let mut inputs = vec![("edges", edges), ("tweets", tweets)];
    if let Some(h) = i.history.as_deref() {
        inputs.push(("history", h));
    }
    out.finish("ingest", ctx.seed, ctx.config_json("ingest", c)?, &inputs)?;
    Ok(())
}

#[derive(Serialize)]
struct CommunitySummary {
    algorithm: Detector,
    communities: usize,
    sizes: Vec<usize>,
    /// Missing for a graph without edges.
    modularity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
}

pub fn communities_cmd(ctx: &Ctx) -> Result<()> {
    let path = require(&ctx.cfg.inputs.network, "network")?;
    let net = load_network(path)?;
    let c = &ctx.cfg.communities;
    let seed = derive_seed(ctx.seed, stage::COMMUNITIES);
    let (part, sweeps, converged) = match c.algorithm {
        Detector::Louvain => (detect_louvain_with(&net, seed, c.resolution).context("communities")?, None, None),
        Detector::LabelPropagation => {
            let o = detect_label_propagation(&net, seed).context("communities")?;
            if !o.converged {
                log::warn!("label propagation stopped after {} sweeps without converging", o.sweeps);
            }
            (o.partition, Some(o.sweeps), Some(o.converged))
        }
    };
    let summary = CommunitySummary {
        algorithm: c.algorithm,
        communities: part.count(),
        sizes: part.sizes(),
        modularity: modularity(&net, &part).ok(),
        sweeps,
        converged,
    };
    let mut out = OutDir::create(&ctx.out)?;
    out.write("partition.csv", |w| Ok(write_partition(&part, net.ids(), w)?))?;
    out.write_json("communities.json", &summary)?;
    out.finish("communities", ctx.seed, ctx.config_json("communities", c)?, &[("network", path)])?;
    Ok(())
}

pub fn simulate_cmd(ctx: &Ctx) -> Result<()> {
    let i = &ctx.cfg.inputs;
    let net_path = require(&i.network, "network")?;
    let net = load_network(net_path)?;
    let part = i.partition.as_deref().map(|p| load_partition(p, &net)).transpose()?;
    let c = &ctx.cfg.simulate;
    let model = c.model.0;
    let params = memecomm::cascade::CascadeParams {
        seed: derive_seed(ctx.seed, stage::SIMULATE),
        ..c.cascade.clone()
    };
    let ens = memecomm::cascade::run_ensemble(&net, part.as_ref(), model, &params, &c.ensemble)
        .with_context(|| format!("simulate {model}"))?;
    let traces: Vec<_> = ens
        .traces
        .into_iter()
        .enumerate()
        .map(|(k, mut t)| {
            t.meme_id = format!("{}-{k:05}", model.name());
            t
        })
        .collect();
    let mut out = OutDir::create(&ctx.out)?;
    out.write("traces.jsonl", |w| Ok(write_traces(&traces, net.ids(), w)?))?;
    out.write_json("summary.json", &ens.summary)?;
    let mut inputs: Vec<(&str, &Path)> = vec![("network", net_path)];
    if let Some(p) = i.partition.as_deref() {
        inputs.push(("partition", p));
    }
    out.finish("simulate", ctx.seed, ctx.config_json("simulate", c)?, &inputs)?;
    Ok(())
}

pub fn metrics_cmd(ctx: &Ctx) -> Result<()> {
    let i = &ctx.cfg.inputs;
    let net_path = require(&i.network, "network")?;
    let part_path = require(&i.partition, "partition")?;
    let traces_path = require(&i.traces, "traces")?;
    let net = load_network(net_path)?;
    let part = load_partition(part_path, &net)?;
    let traces = load_traces(traces_path, &net)?;
    let c = &ctx.cfg.metrics;
    if let Some(t) = traces.iter().find(|t| t.len() < c.min_trace_len) {
        return Err(Error::EmptyTrace(t.meme_id.clone())).context(format!(
            "metrics: traces need at least {} tweets, `{}` has {}",
            c.min_trace_len,
            t.meme_id,
            t.len()
        ));
    }
    let params = memecomm::cascade::CascadeParams {
        seed: derive_seed(ctx.seed, stage::METRICS),
        ..c.baseline.clone()
    };
    let reports = concentration_reports(&traces, &net, &part, c.early_n, &params, &c.ensemble).context("metrics")?;
    let mut out = OutDir::create(&ctx.out)?;
    out.write("reports.csv", |w| Ok(write_reports_csv(&reports, w)?))?;
    write_curves(&mut out, "curves", &reports, &traces)?;
    let mut inputs: Vec<(&str, &Path)> = vec![("network", net_path), ("partition", part_path), ("traces", traces_path)];
    if let Some(p) = i.interactions.as_deref() {
        let log = load_log(p, &net)?;
        let flow = community_flow(&log, &net, &part, c.flow_kind).context("metrics: flow")?;
        out.write_json("flow.json", &flow)?;
        inputs.push(("interactions", p));
    }
    out.finish("metrics", ctx.seed, ctx.config_json("metrics", c)?, &inputs)?;
    Ok(())
}

pub fn features_cmd(ctx: &Ctx) -> Result<()> {
    let i = &ctx.cfg.inputs;
    let net_path = require(&i.network, "network")?;
    let part_path = require(&i.partition, "partition")?;
    let traces_path = require(&i.traces, "traces")?;
    let net = load_network(net_path)?;
    let part = load_partition(part_path, &net)?;
    let traces = load_traces(traces_path, &net)?;
    let mut inputs: Vec<(&str, &Path)> = vec![("network", net_path), ("partition", part_path), ("traces", traces_path)];
    let log = match i.interactions.as_deref() {
        Some(p) => {
            inputs.push(("interactions", p));
            load_log(p, &net)?
        }
        None => InteractionLog::default(),
    };
    let c = &ctx.cfg.features;
    let rows = extract_all(&traces, &net, &part, &log, c.early_n).context("features")?;
    let mut out = OutDir::create(&ctx.out)?;
    out.write("features.csv", |w| Ok(write_features_csv(&rows, w)?))?;
    out.finish("features", ctx.seed, ctx.config_json("features", c)?, &inputs)?;
    Ok(())
}

fn load_features(path: &Path) -> Result<Vec<FeatureRow>> {
    read_features_csv(open(path)?).with_context(|| format!("features {}", path.display()))
}

pub fn train_cmd(ctx: &Ctx) -> Result<()> {
    let path = require(&ctx.cfg.inputs.features, "features")?;
    let rows = load_features(path)?;
    let c = &ctx.cfg.train;
    let popularity = |r: &FeatureRow| match c.mode {
        LabelMode::Tweets => r.final_tweets,
        LabelMode::Users => r.final_users,
    };
    // same rule as evaluation: cut over all memes, then drop short ones
    let all: Vec<usize> = rows.iter().map(popularity).collect();
    let threshold = nearest_rank_threshold(&all, c.theta).context("train")?;
    let kept: Vec<&FeatureRow> = rows.iter().filter(|r| r.final_tweets >= c.min_tweets).collect();
    let x: Vec<Vec<f64>> = kept.iter().map(|r| r.features.to_row()).collect();
    let y: Vec<bool> = kept.iter().map(|r| popularity(r) > threshold).collect();
    let params = ForestParams {
        seed: derive_seed(ctx.seed, stage::TRAIN),
        ..c.forest.clone()
    };
    let mut model = train_forest(&x, &y, &params).context("train")?;
    model.meta.theta = Some(c.theta);
    model.meta.label_mode = Some(c.mode);
    let text = model.to_json()?;
    let mut out = OutDir::create(&ctx.out)?;
    out.write("model.json", |w| {
        use std::io::Write;
        writeln!(w, "{text}")?;
        Ok(())
    })?;
    out.finish("train", ctx.seed, ctx.config_json("train", c)?, &[("features", path)])?;
    Ok(())
}

pub fn eval_cmd(ctx: &Ctx) -> Result<()> {
    let path = require(&ctx.cfg.inputs.features, "features")?;
    let rows = load_features(path)?;
    let config = EvalConfig {
        seed: derive_seed(ctx.seed, stage::EVAL),
        ..ctx.cfg.eval.clone()
    };
    let report = evaluate(&rows, &config).context("eval")?;
    let mut out = OutDir::create(&ctx.out)?;
    out.write_json("eval.json", &report)?;
    out.write("eval.csv", |w| Ok(write_eval_csv(&report, w)?))?;
    out.finish("eval", ctx.seed, ctx.config_json("eval", &ctx.cfg.eval)?, &[("features", path)])?;
    Ok(())
}

#[derive(Serialize)]
struct SynthSummary<'a> {
    network: &'a PlantedPartitionSpec,
    cascades: &'a PlantedCascadeSpec,
    degrees: DegreeStats,
    sparse_warning: bool,
    n_memes: usize,
    interactions: usize,
}

pub fn synth_cmd(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.synth;
    let net_spec = PlantedPartitionSpec {
        seed: derive_seed(ctx.seed, stage::SYNTH_NETWORK),
        ..c.network.clone()
    };
    let cascade_spec = PlantedCascadeSpec {
        seed: derive_seed(ctx.seed, stage::SYNTH_CASCADES),
        ..c.cascades.clone()
    };
    let planted = gen_network(&net_spec).context("synth: network")?;
    if planted.sparse_warning {
        log::warn!("expected mean degree is below 1");
    }
    let cascades = gen_cascades(&planted.network, &planted.partition, &cascade_spec).context("synth: cascades")?;
    let world = World { planted, cascades };
    let net = &world.planted.network;
    let ids = net.ids();
    let traces: Vec<_> = world.cascades.memes.iter().map(|m| m.trace.clone()).collect();
    let mut out = OutDir::create(&ctx.out)?;
    out.write("network.tsv", |w| Ok(write_edge_list(net, w)?))?;
    out.write("partition.csv", |w| Ok(write_partition(&world.planted.partition, ids, w)?))?;
    out.write("traces.jsonl", |w| Ok(write_traces(&traces, ids, w)?))?;
    out.write("interactions.jsonl", |w| Ok(write_interactions(&world.cascades.log.to_raw(ids), w)?))?;
    write_planted(&mut out, "planted.csv", &world.cascades.memes)?;
    out.write_json(
        "synth.json",
        &SynthSummary {
            network: &net_spec,
            cascades: &cascade_spec,
            degrees: net.degree_stats(),
            sparse_warning: world.planted.sparse_warning,
            n_memes: world.cascades.memes.len(),
            interactions: world.cascades.log.len(),
        },
    )?;
    out.finish("synth", ctx.seed, ctx.config_json("synth", c)?, &[])?;
    Ok(())
}

pub fn reproduce_cmd(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.reproduce;
    let mut out = OutDir::create(&ctx.out)?;
    let report = reproduce::run(c, ctx.seed, &mut out).context("reproduce")?;
    out.finish("reproduce", ctx.seed, ctx.config_json("reproduce", c)?, &[])?;
    for check in &report.acceptance.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] criterion {}: {} — {}", check.criterion, check.name, check.detail);
    }
    if !report.acceptance.passed {
        return Err(AcceptanceFailure(report.acceptance.failures().join("; ")).into());
    }
    Ok(())
}
