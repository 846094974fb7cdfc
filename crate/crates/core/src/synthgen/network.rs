use rand::Rng as _;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::SocialNetwork;
use crate::rng;

/// Planted-partition graph parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedPartitionSpec {
    pub n: usize,
    pub k: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
    /// Explicit community sizes; when absent `k` must divide `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    /// Log-scale spread of per-node degree weights. `0` gives the plain
    /// planted partition; larger values give heavier-tailed degrees while
    /// keeping the expected pair probabilities.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub degree_spread: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Default for PlantedPartitionSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            k: 10,
            p_in: 0.1,
            p_out: 0.002,
            seed: 0,
            sizes: None,
            degree_spread: 0.0,
        }
    }
}

impl PlantedPartitionSpec {
    pub fn community_sizes(&self) -> Result<Vec<usize>> {
        if !(0.0..=1.0).contains(&self.p_in) || !(0.0..=1.0).contains(&self.p_out) || self.p_out >= self.p_in {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= p_out < p_in <= 1, got p_in={} p_out={}",
                self.p_in, self.p_out
            )));
        }
        if !(self.degree_spread >= 0.0 && self.degree_spread.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "degree_spread must be finite and non-negative, got {}",
                self.degree_spread
            )));
        }
        match &self.sizes {
            Some(sizes) => {
                if sizes.len() != self.k || sizes.iter().sum::<usize>() != self.n || sizes.contains(&0) {
                    return Err(Error::InvalidParameter(format!(
                        "sizes {sizes:?} must list k={} positive sizes summing to n={}",
                        self.k, self.n
                    )));
                }
                Ok(sizes.clone())
            }
            None => {
                if self.k == 0 || self.n == 0 || self.n % self.k != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "k={} must divide n={} when sizes are not given",
                        self.k, self.n
                    )));
                }
                Ok(vec![self.n / self.k; self.k])
            }
        }
    }

    /// Expected degree of a node in a community of `size`.
    pub fn expected_degree(&self, size: usize) -> f64 {
        (size as f64 - 1.0) * self.p_in + (self.n - size) as f64 * self.p_out
    }
}

#[derive(Debug, Clone)]
pub struct PlantedNetwork {
    pub network: SocialNetwork,
    pub partition: Partition,
    /// Expected mean degree is below 1.
    pub sparse_warning: bool,
}

/// Per-node lognormal weights, rescaled to mean 1 inside each community.
fn degree_weights(spec: &PlantedPartitionSpec, labels: &[usize], k: usize) -> Result<Vec<f64>> {
    if spec.degree_spread == 0.0 {
        return Ok(vec![1.0; labels.len()]);
    }
    let dist = LogNormal::new(0.0, spec.degree_spread).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut stream = rng::substream(spec.seed, 1);
    let mut w: Vec<f64> = (0..labels.len()).map(|_| dist.sample(&mut stream)).collect();
    let mut sum = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (u, &c) in labels.iter().enumerate() {
        sum[c] += w[u];
        count[c] += 1;
    }
    for (u, &c) in labels.iter().enumerate() {
        w[u] *= count[c] as f64 / sum[c];
    }
    Ok(w)
}

/// Link every intra-community pair with `p_in` and every other pair with
/// `p_out`, independently. With a degree spread, the pair probability is
/// scaled by the product of the two node weights (capped at 1). Nodes are
/// numbered community by community.
pub fn gen_network(spec: &PlantedPartitionSpec) -> Result<PlantedNetwork> {
    let sizes = spec.community_sizes()?;
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect();
    let weight = degree_weights(spec, &labels, sizes.len())?;
    let mut stream = rng::stream(spec.seed);
    let mut edges = Vec::new();
    for u in 0..spec.n {
        for v in u + 1..spec.n {
            let base = if labels[u] == labels[v] { spec.p_in } else { spec.p_out };
            let p = (base * weight[u] * weight[v]).min(1.0);
            if p > 0.0 && stream.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let mean_degree: f64 =
        sizes.iter().map(|&s| s as f64 * spec.expected_degree(s)).sum::<f64>() / spec.n as f64;
    let sparse_warning = mean_degree < 1.0;
    if sparse_warning {
        log::warn!("planted partition has expected mean degree {mean_degree:.3} < 1");
    }
    Ok(PlantedNetwork {
        network: SocialNetwork::from_edges(spec.n, &edges)?,
        partition: Partition::from_labels(&labels)?,
        sparse_warning,
    })
}
