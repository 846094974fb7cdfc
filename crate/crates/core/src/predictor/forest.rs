//! Random forest over dense `f64` feature rows.
//!
//! Bootstrap weights are drawn per distinct `(row, label)` pair in a
//! canonical order, so a fixed seed gives the same forest regardless of
//! sample order, and duplicating every sample leaves predictions unchanged.

use std::cmp::Ordering;

use rand::seq::index;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictor::labels::LabelMode;
use crate::rng::{self, Rng};

/// Version tag of the serialized model layout.
pub const MODEL_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSampling {
    /// One feature subset per tree, used for all its splits.
    PerTree,
    /// A fresh subset at every split.
    PerSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub features_per_tree: usize,
    pub sampling: FeatureSampling,
    /// `None` grows trees until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            features_per_tree: 4,
            sampling: FeatureSampling::PerTree,
            max_depth: None,
            min_leaf: 1,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidParameter("n_trees must be positive".into()));
        }
        if self.features_per_tree == 0 {
            return Err(Error::InvalidParameter("features_per_tree must be positive".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidParameter("min_leaf must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    /// Weighted fraction of positive training mass reaching the leaf.
    Leaf { value: f64 },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Features this tree may split on.
    pub features: Vec<usize>,
    /// Root at index 0.
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_value(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn vote(&self, row: &[f64]) -> bool {
        self.leaf_value(row) > 0.5
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub n_samples: usize,
    pub n_positive: usize,
    pub feature_names: Vec<String>,
    pub theta: Option<f64>,
    pub label_mode: Option<LabelMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format: u32,
    pub n_features: usize,
    pub params: ForestParams,
    pub meta: TrainingMeta,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    fn check_row(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(())
    }

    /// Share of trees voting positive.
    pub fn vote_fraction(&self, row: &[f64]) -> Result<f64> {
        self.check_row(row)?;
        let votes = self.trees.iter().filter(|t| t.vote(row)).count();
        Ok(votes as f64 / self.trees.len() as f64)
    }

    /// Strict majority vote.
    pub fn predict(&self, row: &[f64]) -> Result<bool> {
        self.check_row(row)?;
        let votes = self.trees.iter().filter(|t| t.vote(row)).count();
        Ok(votes * 2 > self.trees.len())
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<bool>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(s)?;
        if model.format != MODEL_FORMAT {
            return Err(Error::InvalidParameter(format!(
                "model format {} is not supported (expected {MODEL_FORMAT})",
                model.format
            )));
        }
        Ok(model)
    }
}

/// Distinct training rows with multiplicities, in canonical order.
struct Groups {
    rows: Vec<Vec<f64>>,
    labels: Vec<bool>,
    mult: Vec<u64>,
}

fn cmp_rows(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn group(rows: &[Vec<f64>], labels: &[bool]) -> Groups {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| cmp_rows(&rows[a], &rows[b]).then(labels[a].cmp(&labels[b])));
    let mut g = Groups {
        rows: Vec::new(),
        labels: Vec::new(),
        mult: Vec::new(),
    };
    for i in order {
        let same = g.rows.last().is_some_and(|r: &Vec<f64>| cmp_rows(r, &rows[i]).is_eq())
            && g.labels.last() == Some(&labels[i]);
        if same {
            *g.mult.last_mut().unwrap() += 1;
        } else {
            g.rows.push(rows[i].clone());
            g.labels.push(labels[i]);
            g.mult.push(1);
        }
    }
    g
}

pub fn train_forest(rows: &[Vec<f64>], labels: &[bool], params: &ForestParams) -> Result<ForestModel> {
    params.validate()?;
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass { positives, negatives });
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::InvalidParameter("feature rows are empty".into()));
    }
    for r in rows {
        if r.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: r.len() });
        }
        if r.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidParameter("feature value is NaN".into()));
        }
    }
    let groups = group(rows, labels);
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(&groups, d, params, &mut rng::substream(params.seed, t as u64)))
        .collect();
    Ok(ForestModel {
        format: MODEL_FORMAT,
        n_features: d,
        params: params.clone(),
        meta: TrainingMeta {
            n_samples: rows.len(),
            n_positive: positives,
            feature_names: Vec::new(),
            theta: None,
            label_mode: None,
        },
        trees,
    })
}

fn pick_features(rng: &mut Rng, d: usize, k: usize) -> Vec<usize> {
    let mut f = index::sample(rng, d, k.min(d)).into_vec();
    f.sort_unstable();
    f
}

fn gini(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

struct Split {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

struct Builder<'a> {
    g: &'a Groups,
    d: usize,
    params: &'a ForestParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn mass(&self, samples: &[(usize, u64)]) -> (u64, u64) {
        samples.iter().fold((0, 0), |(p, t), &(i, w)| {
            (p + if self.g.labels[i] { w } else { 0 }, t + w)
        })
    }

    fn best_split(&self, samples: &mut [(usize, u64)], features: &[usize]) -> Option<Split> {
        let (pos, total) = self.mass(samples);
        let parent = gini(pos as f64, total as f64);
        let mut best: Option<Split> = None;
        for &f in features {
            samples.sort_by(|a, b| self.g.rows[a.0][f].total_cmp(&self.g.rows[b.0][f]));
            let (mut lp, mut lt, mut lc) = (0u64, 0u64, 0usize);
            for k in 0..samples.len() - 1 {
                let (i, w) = samples[k];
                lp += if self.g.labels[i] { w } else { 0 };
                lt += w;
                lc += 1;
                let x = self.g.rows[i][f];
                let next = self.g.rows[samples[k + 1].0][f];
                if x == next || lc < self.params.min_leaf || samples.len() - lc < self.params.min_leaf {
                    continue;
                }
                let (rp, rt) = (pos - lp, total - lt);
                let child = (lt as f64 / total as f64) * gini(lp as f64, lt as f64)
                    + (rt as f64 / total as f64) * gini(rp as f64, rt as f64);
                let decrease = parent - child;
                if best.as_ref().is_none_or(|b| decrease > b.decrease) {
                    let mut threshold = x + (next - x) / 2.0;
                    if threshold >= next {
                        threshold = x;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        decrease,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, mut samples: Vec<(usize, u64)>, depth: usize, rng: &mut Rng, tree_features: &[usize]) -> usize {
        let id = self.nodes.len();
        let (pos, total) = self.mass(&samples);
        let value = if total == 0 { 0.0 } else { pos as f64 / total as f64 };
        self.nodes.push(Node::Leaf { value });
        let pure = pos == 0 || pos == total;
        let capped = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || capped || samples.len() < 2 * self.params.min_leaf {
            return id;
        }
        let features = match self.params.sampling {
            FeatureSampling::PerTree => tree_features.to_vec(),
            FeatureSampling::PerSplit => pick_features(rng, self.d, self.params.features_per_tree),
        };
        let Some(split) = self.best_split(&mut samples, &features) else {
            return id;
        };
        let (left, right): (Vec<_>, Vec<_>) = samples
            .into_iter()
            .partition(|&(i, _)| self.g.rows[i][split.feature] <= split.threshold);
        let l = self.grow(left, depth + 1, rng, tree_features);
        let r = self.grow(right, depth + 1, rng, tree_features);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: l,
            right: r,
        };
        id
    }
}

fn grow_tree(g: &Groups, d: usize, params: &ForestParams, rng: &mut Rng) -> Tree {
    let features = match params.sampling {
        FeatureSampling::PerTree => pick_features(rng, d, params.features_per_tree),
        FeatureSampling::PerSplit => (0..d).collect(),
    };
    let poisson = Poisson::new(1.0).expect("valid rate");
    let mut samples: Vec<(usize, u64)> = g
        .mult
        .iter()
        .enumerate()
        .map(|(i, &m)| (i, m * poisson.sample(rng) as u64))
        .filter(|&(_, w)| w > 0)
        .collect();
    if samples.is_empty() {
        // every weight drew zero; fall back to the unweighted mass
        samples = g.mult.iter().copied().enumerate().collect();
    }
    let mut b = Builder {
        g,
        d,
        params,
        nodes: Vec::new(),
    };
    b.grow(samples, 0, rng, &features);
    Tree { features, nodes: b.nodes }
}
