use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate_with_rng, subsample, CascadeParams, MemeTrace, Model};
use crate::community::Partition;
use crate::error::Result;
use crate::graph::SocialNetwork;
use crate::metrics::{early_stage, raw_metrics, RawMetrics, DEFAULT_EARLY_STAGE};
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub n_sims: usize,
    pub n_samples: usize,
    /// Window for the per-trace measures.
    pub early_n: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_sims: 100,
            n_samples: 10,
            early_n: DEFAULT_EARLY_STAGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub stderr: f64,
    pub n: usize,
}

impl MetricSummary {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.collect();
        Self {
            mean: stats::mean(&v),
            stderr: stats::std_err(&v),
            n: v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub model: String,
    pub target_tweets: usize,
    pub n_traces: usize,
    pub empty_dropped: usize,
    pub r: MetricSummary,
    pub g: MetricSummary,
    #[serde(rename = "Ht")]
    pub ht: MetricSummary,
    #[serde(rename = "Hu")]
    pub hu: MetricSummary,
    #[serde(rename = "Nt")]
    pub nt: MetricSummary,
    #[serde(rename = "Nu")]
    pub nu: MetricSummary,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    /// Subsampled traces, simulation-major: `sim * n_samples + sample`.
    pub traces: Vec<MemeTrace>,
    /// Measures of each trace's early stage, aligned with `traces`.
    pub metrics: Vec<RawMetrics>,
    pub summary: EnsembleSummary,
}

/// `n_sims` simulations, each subsampled `n_samples` times.
///
/// Simulation `i` draws from substream `i` of `params.seed`, so two models
/// run with the same seed see paired streams. Output order is fixed by
/// simulation index regardless of thread scheduling.
pub fn run_ensemble(
    net: &SocialNetwork,
    partition: Option<&Partition>,
    model: Model,
    params: &CascadeParams,
    config: &EnsembleConfig,
) -> Result<Ensemble> {
    params.validate()?;
    let per_sim: Vec<Vec<MemeTrace>> = (0..config.n_sims)
        .into_par_iter()
        .map(|i| {
            let mut stream = rng::substream(params.seed, i as u64);
            let full = simulate_with_rng(net, partition, model, params, &mut stream)?;
            let sim_seed = rng::derive_seed(params.seed, i as u64);
            (0..config.n_samples)
                .map(|j| subsample(&full, params.sample_rate, rng::derive_seed(sim_seed, j as u64)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let all: Vec<MemeTrace> = per_sim.into_iter().flatten().collect();
    let before = all.len();
    let traces: Vec<MemeTrace> = all.into_iter().filter(|t| !t.is_empty()).collect();
    let empty_dropped = before - traces.len();

    let metrics = match partition {
        Some(part) => traces
            .par_iter()
            .map(|t| raw_metrics(&early_stage(t, config.early_n), net, part))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let summary = EnsembleSummary {
        model: model.name().to_string(),
        target_tweets: params.target_tweets,
        n_traces: traces.len(),
        empty_dropped,
        r: MetricSummary::of(metrics.iter().map(|m| m.r)),
        g: MetricSummary::of(metrics.iter().map(|m| m.g)),
        ht: MetricSummary::of(metrics.iter().map(|m| m.ht)),
        hu: MetricSummary::of(metrics.iter().map(|m| m.hu)),
        nt: MetricSummary::of(metrics.iter().map(|m| m.nt)),
        nu: MetricSummary::of(metrics.iter().map(|m| m.nu)),
    };
    Ok(Ensemble {
        traces,
        metrics,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::M1Mode;

    fn ring(n: usize) -> SocialNetwork {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        SocialNetwork::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn counts_and_determinism() {
        let net = ring(60);
        let part = Partition::from_labels(&(0..60).map(|i| i / 10).collect::<Vec<_>>()).unwrap();
        let params = CascadeParams {
            seed: 17,
            ..Default::default()
        };
        let cfg = EnsembleConfig::default();
        let a = run_ensemble(&net, Some(&part), Model::M2, &params, &cfg).unwrap();
        assert_eq!(a.traces.len(), 1000);
        assert!(a.traces.iter().all(|t| t.len() == 50));
        let b = run_ensemble(&net, Some(&part), Model::M2, &params, &cfg).unwrap();
        assert_eq!(a.summary, b.summary);
        assert_eq!(a.traces, b.traces);
    }

    #[test]
    fn m1_self_ratio_is_one() {
        let net = ring(40);
        let part = Partition::from_labels(&(0..40).map(|i| i / 8).collect::<Vec<_>>()).unwrap();
        let params = CascadeParams {
            target_tweets: 20,
            seed: 3,
            ..Default::default()
        };
        let cfg = EnsembleConfig {
            n_sims: 10,
            n_samples: 3,
            ..Default::default()
        };
        let e = run_ensemble(&net, Some(&part), Model::M1(M1Mode::Tweets), &params, &cfg).unwrap();
        let r = e.summary.r.mean.unwrap();
        assert_eq!(r / r, 1.0);
        assert_eq!(e.summary.n_traces, 30);
    }
}
