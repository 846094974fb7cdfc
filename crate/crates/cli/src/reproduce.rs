//! One-command synthetic reproduction with built-in acceptance checks.
//!
//! Four stages, each writing its artifacts before the next starts:
//!
//! 1. `ordering/`: the baseline models on a plain planted partition, with
//!    pairwise Mann-Whitney tests on usage dominance and both entropies.
//! 2. `world/`: a degree-corrected planted world with planted simple and
//!    complex memes; communication flow and the simple/complex dichotomy.
//! 3. `concentration/`: per-meme relative measures and binned curves.
//! 4. `prediction/`: early features and the precision/recall grid.
//!
//! `report.json` collects the summaries and an `acceptance` section. All
//! seeds derive from the master seed; seeds inside the config specs are
//! ignored.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use memecomm::cascade::{run_ensemble, CascadeParams, EnsembleConfig, EnsembleSummary, M1Mode, Model};
use memecomm::community::{detect_louvain, modularity, write_partition};
use memecomm::graph::io::{write_edge_list, write_interactions};
use memecomm::graph::DegreeStats;
use memecomm::metrics::{
    community_flow, early_stage, usage_entropy, write_reports_csv, FlowSummary, RawMetrics, DEFAULT_EARLY_STAGE,
};
use memecomm::predictor::{
    evaluate, extract_all, write_eval_csv, write_features_csv, EvalConfig, EvalReport, LabelMode, MethodScore,
};
use memecomm::rng::derive_seed;
use memecomm::stats::{self, MannWhitney};
use memecomm::synthgen::{
    gen_cascades, gen_network, Contagion, PlantedCascadeSpec, PlantedMeme, PlantedNetwork, PlantedPartitionSpec, PlantedWorld,
};

use crate::manifest::OutDir;
use crate::pipeline::{concentration_reports, write_csv_rows, write_curves};

mod label {
    pub const ORDERING_NETWORK: u64 = 11;
    pub const ORDERING_CASCADES: u64 = 12;
    pub const WORLD_NETWORK: u64 = 13;
    pub const WORLD_CASCADES: u64 = 14;
    pub const EVAL: u64 = 15;
    pub const BASELINES: u64 = 16;
    pub const DETECTION: u64 = 17;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Significance level of each model-ordering comparison.
    pub ordering_alpha: f64,
    /// Significance level of the intra/inter flow comparisons.
    pub flow_alpha: f64,
    /// Minimum gap between simple and complex median communities touched.
    pub median_gap: f64,
    /// Minimum Spearman correlation of early usage entropy and popularity.
    pub min_spearman: f64,
    pub lift_theta: f64,
    pub lift_mode: LabelMode,
    /// Required relative lift of the model over the community-blind baseline.
    pub lift_over_blind: f64,
    /// Required relative lift of the model over the random-guess expectation.
    pub lift_over_random: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ordering_alpha: 0.01,
            flow_alpha: 0.001,
            median_gap: 2.0,
            min_spearman: 0.3,
            lift_theta: 90.0,
            lift_mode: LabelMode::Users,
            lift_over_blind: 0.5,
            lift_over_random: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReproduceConfig {
    /// Plain planted partition for the model-ordering ensembles.
    pub ordering_network: PlantedPartitionSpec,
    pub cascade: CascadeParams,
    pub ensemble: EnsembleConfig,
    /// Degree-corrected planted partition hosting the meme world.
    pub world_network: PlantedPartitionSpec,
    pub world: PlantedCascadeSpec,
    pub early_n: usize,
    /// Ensembles behind the per-meme M1 baselines.
    pub baseline_ensemble: EnsembleConfig,
    pub eval: EvalConfig,
    pub thresholds: Thresholds,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self {
            ordering_network: PlantedPartitionSpec::default(),
            cascade: CascadeParams::default(),
            ensemble: EnsembleConfig::default(),
            world_network: PlantedPartitionSpec {
                degree_spread: 1.5,
                ..Default::default()
            },
            world: PlantedCascadeSpec::default(),
            early_n: DEFAULT_EARLY_STAGE,
            baseline_ensemble: EnsembleConfig::default(),
            eval: EvalConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl ReproduceConfig {
    /// Copy with every seed derived from `seed`.
    pub fn seeded(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.ordering_network.seed = derive_seed(seed, label::ORDERING_NETWORK);
        c.cascade.seed = derive_seed(seed, label::ORDERING_CASCADES);
        c.world_network.seed = derive_seed(seed, label::WORLD_NETWORK);
        c.world.seed = derive_seed(seed, label::WORLD_CASCADES);
        c.eval.seed = derive_seed(seed, label::EVAL);
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub communities: usize,
    pub modularity: f64,
    /// Adjusted Rand index against the planted communities.
    pub ari: f64,
    pub planted_modularity: f64,
}

/// Louvain run for the record; the analyses use the planted communities.
fn detection(planted: &PlantedNetwork, seed: u64) -> Result<Detection> {
    let found = detect_louvain(&planted.network, seed)?;
    Ok(Detection {
        communities: found.count(),
        modularity: modularity(&planted.network, &found)?,
        ari: stats::adjusted_rand_index(found.assignment(), planted.partition.assignment()),
        planted_modularity: modularity(&planted.network, &planted.partition)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: String,
    /// Model expected to score higher.
    pub higher: String,
    pub lower: String,
    pub mean_higher: Option<f64>,
    pub mean_lower: Option<f64>,
    pub test: Option<MannWhitney>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingResult {
    pub network: DegreeStats,
    pub detection: Detection,
    pub ensembles: Vec<EnsembleSummary>,
    pub comparisons: Vec<Comparison>,
}

const ORDERING_MODELS: [Model; 5] = [Model::M1(M1Mode::Tweets), Model::M1(M1Mode::Users), Model::M2, Model::M3, Model::M4];

/// Pairs `(lower, higher)` by usage dominance; entropies flip them.
const ORDERING_PAIRS: [(Model, Model); 3] = [
    (Model::M1(M1Mode::Tweets), Model::M2),
    (Model::M2, Model::M3),
    (Model::M2, Model::M4),
];

fn metric_values(metrics: &[RawMetrics], name: &str) -> Vec<f64> {
    metrics
        .iter()
        .map(|m| match name {
            "r" => m.r,
            "Ht" => m.ht,
            "Hu" => m.hu,
            _ => unreachable!("unknown ordering metric {name}"),
        })
        .collect()
}

/// Stage 1: ensembles of every model on the same planted network and
/// paired random streams, then the ordering tests.
pub fn run_ordering(cfg: &ReproduceConfig, seed: u64) -> Result<(OrderingResult, PlantedNetwork)> {
    let planted = gen_network(&cfg.ordering_network).context("ordering network")?;
    let (net, part) = (&planted.network, &planted.partition);
    let mut ensembles = Vec::new();
    for model in ORDERING_MODELS {
        let ens = run_ensemble(net, Some(part), model, &cfg.cascade, &cfg.ensemble)
            .with_context(|| format!("{model} ensemble"))?;
        log::info!("ordering: {model} done ({} traces)", ens.summary.n_traces);
        ensembles.push((model, ens));
    }
    let find = |m: Model| &ensembles.iter().find(|(x, _)| *x == m).expect("model was run").1;
    let alpha = cfg.thresholds.ordering_alpha;
    let mut comparisons = Vec::new();
    for metric in ["r", "Ht", "Hu"] {
        for (lo, hi) in ORDERING_PAIRS {
            // dominance rises along the pair, entropy falls
            let (hi, lo) = if metric == "r" { (hi, lo) } else { (lo, hi) };
            let a = metric_values(&find(hi).metrics, metric);
            let b = metric_values(&find(lo).metrics, metric);
            let (mean_higher, mean_lower) = (stats::mean(&a), stats::mean(&b));
            let test = stats::mann_whitney(&a, &b);
            let passed = matches!((mean_higher, mean_lower), (Some(x), Some(y)) if x > y)
                && test.is_some_and(|t| t.p_greater < alpha);
            comparisons.push(Comparison {
                metric: metric.to_string(),
                higher: hi.name().to_string(),
                lower: lo.name().to_string(),
                mean_higher,
                mean_lower,
                test,
                passed,
            });
        }
    }
    let result = OrderingResult {
        network: net.degree_stats(),
        detection: detection(&planted, derive_seed(seed, label::DETECTION))?,
        ensembles: ensembles.into_iter().map(|(_, e)| e.summary).collect(),
        comparisons,
    };
    Ok((result, planted))
}

/// Stage 2 input: the planted meme world.
pub struct World {
    pub planted: PlantedNetwork,
    pub cascades: PlantedWorld,
}

pub fn build_world(cfg: &ReproduceConfig) -> Result<World> {
    let planted = gen_network(&cfg.world_network).context("world network")?;
    let cascades = gen_cascades(&planted.network, &planted.partition, &cfg.world).context("world cascades")?;
    Ok(World { planted, cascades })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub n_simple: usize,
    pub n_complex: usize,
    pub median_touched_simple: Option<f64>,
    pub median_touched_complex: Option<f64>,
    /// Simple vs complex communities touched.
    pub touched_test: Option<MannWhitney>,
    /// Early usage entropy vs total tweets, over all memes.
    pub spearman_entropy_popularity: Option<f64>,
}

pub fn dichotomy(world: &World, early_n: usize) -> Result<Dichotomy> {
    let part = &world.planted.partition;
    let (mut simple, mut complex) = (Vec::new(), Vec::new());
    let mut entropy = Vec::new();
    let mut popularity = Vec::new();
    for m in &world.cascades.memes {
        let early = early_stage(&m.trace, early_n);
        let touched = early.community_tweet_counts(part)?.iter().filter(|&&c| c > 0).count() as f64;
        match m.contagion {
            Contagion::Simple => simple.push(touched),
            Contagion::Complex => complex.push(touched),
        }
        entropy.push(usage_entropy(&early, part)?);
        popularity.push(m.trace.len() as f64);
    }
    Ok(Dichotomy {
        n_simple: simple.len(),
        n_complex: complex.len(),
        median_touched_simple: stats::median(&simple),
        median_touched_complex: stats::median(&complex),
        touched_test: stats::mann_whitney(&simple, &complex),
        spearman_entropy_popularity: stats::spearman(&entropy, &popularity),
    })
}

pub fn flow(world: &World) -> Result<FlowSummary> {
    let report = community_flow(&world.cascades.log, &world.planted.network, &world.planted.partition, None)?;
    Ok(report.summary)
}

/// Stage 4: early features of every meme and the evaluation grid.
pub fn prediction(world: &World, cfg: &ReproduceConfig, eval: &EvalConfig) -> Result<(Vec<memecomm::predictor::FeatureRow>, EvalReport)> {
    let traces: Vec<_> = world.cascades.memes.iter().map(|m| m.trace.clone()).collect();
    let rows = extract_all(
        &traces,
        &world.planted.network,
        &world.planted.partition,
        &world.cascades.log,
        cfg.early_n,
    )
    .context("features")?;
    let report = evaluate(&rows, eval).context("evaluation")?;
    Ok((rows, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub detail: String,
}

fn fmt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
}

pub fn ordering_checks(o: &OrderingResult) -> Vec<Check> {
    o.comparisons
        .iter()
        .map(|c| Check {
            criterion: 1,
            name: format!("{}({}) > {}({})", c.metric, c.higher, c.metric, c.lower),
            passed: c.passed,
            p_value: c.test.map(|t| t.p_greater),
            detail: format!("means {} vs {}", fmt(c.mean_higher), fmt(c.mean_lower)),
        })
        .collect()
}

pub fn flow_checks(f: &FlowSummary, alpha: f64) -> Vec<Check> {
    let check = |name: &str, hi: Option<f64>, lo: Option<f64>, test: Option<MannWhitney>| {
        let p = test.map(|t| t.p_greater);
        Check {
            criterion: 2,
            name: name.to_string(),
            passed: matches!((hi, lo), (Some(a), Some(b)) if a > b) && p.is_some_and(|p| p < alpha),
            p_value: p,
            detail: format!("{} vs {}", fmt(hi), fmt(lo)),
        }
    };
    vec![
        check("w_intra > w_inter", f.mean_w_intra, f.mean_w_inter, f.weight_test),
        check("f_intra > f_inter", f.mean_f_intra, f.mean_f_inter, f.focus_test),
    ]
}

pub fn dichotomy_checks(d: &Dichotomy, t: &Thresholds) -> Vec<Check> {
    let gap = match (d.median_touched_simple, d.median_touched_complex) {
        (Some(s), Some(c)) => Some(s - c),
        _ => None,
    };
    vec![
        Check {
            criterion: 3,
            name: "simple memes touch more communities".into(),
            passed: gap.is_some_and(|g| g >= t.median_gap),
            p_value: d.touched_test.map(|t| t.p_greater),
            detail: format!(
                "median {} vs {} (gap {}, need >= {})",
                fmt(d.median_touched_simple),
                fmt(d.median_touched_complex),
                fmt(gap),
                t.median_gap
            ),
        },
        Check {
            criterion: 3,
            name: "early entropy tracks popularity".into(),
            passed: d.spearman_entropy_popularity.is_some_and(|r| r > t.min_spearman),
            p_value: None,
            detail: format!("spearman {} (need > {})", fmt(d.spearman_entropy_popularity), t.min_spearman),
        },
    ]
}

pub fn lift_checks(report: &EvalReport, t: &Thresholds) -> Vec<Check> {
    let Some(cell) = report.cell(t.lift_theta, t.lift_mode) else {
        return vec![Check {
            criterion: 4,
            name: "prediction lift".into(),
            passed: false,
            p_value: None,
            detail: format!("no evaluation cell for theta_{} = {}", t.lift_mode.tag(), t.lift_theta),
        }];
    };
    let model = &cell.model.pooled;
    let blind = &cell.community_blind.pooled;
    let random = cell.random_guess.expected;
    let beats = |x: Option<f64>, base: Option<f64>, lift: f64| match (x, base) {
        (Some(x), Some(b)) => x >= (1.0 + lift) * b,
        (Some(_), None) => true,
        _ => false,
    };
    let mut checks = Vec::new();
    for (what, m, b) in [
        ("precision", model.precision, blind.precision),
        ("recall", model.recall, blind.recall),
    ] {
        checks.push(Check {
            criterion: 4,
            name: format!("model {what} vs community-blind"),
            passed: beats(m, b, t.lift_over_blind),
            p_value: None,
            detail: format!("{} vs {} (need +{}%)", fmt(m), fmt(b), t.lift_over_blind * 100.0),
        });
        checks.push(Check {
            criterion: 4,
            name: format!("model {what} vs random guess"),
            passed: beats(m, Some(random), t.lift_over_random),
            p_value: None,
            detail: format!("{} vs {:.6} (need +{}%)", fmt(m), random, t.lift_over_random * 100.0),
        });
    }
    checks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Acceptance {
    pub fn new(checks: Vec<Check>) -> Self {
        Self {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSummary {
    pub network: DegreeStats,
    pub detection: Detection,
    pub n_memes: usize,
    pub interactions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub seed: u64,
    pub ordering: OrderingResult,
    pub world: WorldSummary,
    pub flow: FlowSummary,
    pub dichotomy: Dichotomy,
    pub grid: Vec<MethodScore>,
    pub acceptance: Acceptance,
}

fn fmt_csv(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_ensembles(out: &mut OutDir, summaries: &[EnsembleSummary]) -> Result<()> {
    let mut rows = Vec::new();
    for s in summaries {
        for (name, m) in [("r", &s.r), ("g", &s.g), ("Ht", &s.ht), ("Hu", &s.hu), ("Nt", &s.nt), ("Nu", &s.nu)] {
            rows.push(vec![s.model.clone(), name.to_string(), fmt_csv(m.mean), m.stderr.to_string(), m.n.to_string()]);
        }
    }
    out.write("ordering/ensembles.csv", |w| write_csv_rows(w, "model,metric,mean,stderr,n", &rows))
}

fn write_world(out: &mut OutDir, world: &World) -> Result<()> {
    let net = &world.planted.network;
    let ids = net.ids();
    out.write("world/network.tsv", |w| Ok(write_edge_list(net, w)?))?;
    out.write("world/partition.csv", |w| Ok(write_partition(&world.planted.partition, ids, w)?))?;
    let traces: Vec<_> = world.cascades.memes.iter().map(|m| m.trace.clone()).collect();
    out.write("world/traces.jsonl", |w| Ok(memecomm::cascade::write_traces(&traces, ids, w)?))?;
    out.write("world/interactions.jsonl", |w| {
        Ok(write_interactions(&world.cascades.log.to_raw(ids), w)?)
    })?;
    write_planted(out, "world/planted.csv", &world.cascades.memes)
}

/// Ground truth per meme: contagion type and seed community.
pub fn write_planted(out: &mut OutDir, name: &str, memes: &[PlantedMeme]) -> Result<()> {
    let rows: Vec<Vec<String>> = memes
        .iter()
        .map(|m| {
            let kind = match m.contagion {
                Contagion::Simple => "simple",
                Contagion::Complex => "complex",
            };
            vec![
                m.trace.meme_id.clone(),
                kind.to_string(),
                m.seed_community.to_string(),
                m.trace.len().to_string(),
                m.trace.adopters().len().to_string(),
            ]
        })
        .collect();
    out.write(name, |w| write_csv_rows(w, "meme_id,contagion,seed_community,tweets,users", &rows))
}

/// Run every stage, writing artifacts into `out`. The returned report says
/// whether the acceptance checks passed; failing checks are not an error
/// here.
pub fn run(cfg: &ReproduceConfig, seed: u64, out: &mut OutDir) -> Result<ReproduceReport> {
    let cfg = cfg.seeded(seed);
    let t = &cfg.thresholds;

    let (ordering, _) = run_ordering(&cfg, seed).context("stage 1 (model ordering)")?;
    write_ensembles(out, &ordering.ensembles)?;
    out.write_json("ordering/summary.json", &ordering)?;

    let world = build_world(&cfg).context("stage 2 (planted world)")?;
    write_world(out, &world)?;
    let flow = flow(&world).context("stage 2 (flow)")?;
    out.write_json("world/flow.json", &flow)?;
    let dichotomy = dichotomy(&world, cfg.early_n).context("stage 2 (dichotomy)")?;
    let world_summary = WorldSummary {
        network: world.planted.network.degree_stats(),
        detection: detection(&world.planted, derive_seed(seed, label::DETECTION))?,
        n_memes: world.cascades.memes.len(),
        interactions: world.cascades.log.len(),
    };

    let traces: Vec<_> = world.cascades.memes.iter().map(|m| m.trace.clone()).collect();
    let baseline = CascadeParams {
        seed: derive_seed(seed, label::BASELINES),
        ..cfg.cascade.clone()
    };
    let reports = concentration_reports(
        &traces,
        &world.planted.network,
        &world.planted.partition,
        cfg.early_n,
        &baseline,
        &cfg.baseline_ensemble,
    )
    .context("stage 3 (concentration)")?;
    out.write("concentration/reports.csv", |w| Ok(write_reports_csv(&reports, w)?))?;
    write_curves(out, "concentration/curves", &reports, &traces)?;

    let (rows, eval) = prediction(&world, &cfg, &cfg.eval).context("stage 4 (prediction)")?;
    out.write("prediction/features.csv", |w| Ok(write_features_csv(&rows, w)?))?;
    out.write_json("prediction/eval.json", &eval)?;
    out.write("prediction/eval.csv", |w| Ok(write_eval_csv(&eval, w)?))?;

    let mut checks = ordering_checks(&ordering);
    checks.extend(flow_checks(&flow, t.flow_alpha));
    checks.extend(dichotomy_checks(&dichotomy, t));
    checks.extend(lift_checks(&eval, t));
    let report = ReproduceReport {
        seed,
        ordering,
        world: world_summary,
        flow,
        dichotomy,
        grid: eval.cells.iter().flat_map(|c| c.scores()).collect(),
        acceptance: Acceptance::new(checks),
    };
    out.write_json("report.json", &report)?;
    Ok(report)
}
