//! Multi-level Louvain modularity optimization.
//!
//! Each level runs local moving in a seeded random node order until no node
//! changes community, then collapses communities into weighted super-nodes.
//! A node only moves when the best gain strictly beats staying put; among
//! equally good targets the lowest community id wins.

use rand::seq::SliceRandom;

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::SocialNetwork;
use crate::rng;

const MAX_PASSES: usize = 100;
const MAX_LEVELS: usize = 32;
const GAIN_EPS: f64 = 1e-12;

pub fn detect_louvain(net: &SocialNetwork, seed: u64) -> Result<Partition> {
    detect_louvain_with(net, seed, 1.0)
}

pub fn detect_louvain_with(net: &SocialNetwork, seed: u64, resolution: f64) -> Result<Partition> {
    if net.n() == 0 {
        return Err(Error::InvalidParameter("community detection on an empty network".into()));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParameter(format!("resolution must be positive, got {resolution}")));
    }
    if net.edge_count() == 0 {
        return Partition::singletons(net.n());
    }

    let mut level = Level::from_network(net);
    // community of each original node in the current level's node space
    let mut membership: Vec<usize> = (0..net.n()).collect();
    let mut rng = rng::stream(seed);

    for _ in 0..MAX_LEVELS {
        let (communities, moved) = level.local_moving(resolution, &mut rng);
        if !moved {
            break;
        }
        let (dense, count) = renumber(&communities);
        for c in membership.iter_mut() {
            *c = dense[*c];
        }
        if count == level.n() {
            break;
        }
        level = level.aggregate(&dense, count);
    }
    Partition::from_labels(&membership)
}

/// Weighted graph used at one aggregation level.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    total: f64,
}

impl Level {
    fn from_network(net: &SocialNetwork) -> Self {
        let adjacency: Vec<Vec<(usize, f64)>> = (0..net.n())
            .map(|u| net.adj(u).iter().map(|&v| (v, 1.0)).collect())
            .collect();
        Self::new(adjacency, vec![0.0; net.n()])
    }

    fn new(adjacency: Vec<Vec<(usize, f64)>>, self_loops: Vec<f64>) -> Self {
        let degree: Vec<f64> = adjacency
            .iter()
            .zip(&self_loops)
            .map(|(list, &s)| list.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * s)
            .collect();
        let total = degree.iter().sum();
        Self {
            adjacency,
            self_loops,
            degree,
            total,
        }
    }

    fn n(&self) -> usize {
        self.adjacency.len()
    }

    /// Returns the community of every node and whether any node moved.
    fn local_moving(&self, resolution: f64, rng: &mut rng::Rng) -> (Vec<usize>, bool) {
        let n = self.n();
        let mut community: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut link = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut any_moved = false;

        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &u in &order {
                let current = community[u];
                let k = self.degree[u];
                tot[current] -= k;

                for &(v, w) in &self.adjacency[u] {
                    let c = community[v];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }

                let gain = |c: usize, l: f64| l - resolution * tot[c] * k / self.total;
                let stay = gain(current, link[current]);
                let mut best = current;
                let mut best_gain = stay;
                for &c in &touched {
                    if c == current {
                        continue;
                    }
                    let g = gain(c, link[c]);
                    if g > stay + GAIN_EPS
                        && (g > best_gain + GAIN_EPS
                            || (best != current && (g - best_gain).abs() <= GAIN_EPS && c < best))
                    {
                        best = c;
                        best_gain = g;
                    }
                }

                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();

                tot[best] += k;
                if best != current {
                    community[u] = best;
                    moved = true;
                    any_moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        (community, any_moved)
    }

    fn aggregate(&self, dense: &[usize], count: usize) -> Level {
        let mut self_loops = vec![0.0; count];
        let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        for u in 0..self.n() {
            let cu = dense[u];
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in &self.adjacency[u] {
                let cv = dense[v];
                if cu == cv {
                    // each internal edge is seen from both endpoints
                    self_loops[cu] += w / 2.0;
                } else {
                    *maps[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        Level::new(adjacency, self_loops)
    }
}

/// Map community labels to `0..count` in order of first appearance.
fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    let dense = labels
        .iter()
        .map(|&l| {
            if map[l] == usize::MAX {
                map[l] = next;
                next += 1;
            }
            map[l]
        })
        .collect();
    (dense, next)
}
