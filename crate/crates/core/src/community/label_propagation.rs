use rand::seq::SliceRandom;

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::SocialNetwork;
use crate::rng;

/// Sweep cap; a run that has not settled by then keeps its current labels.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPropagationOutcome {
    pub partition: Partition,
    pub sweeps: usize,
    pub converged: bool,
}

/// Sequential label propagation in a seeded node order.
///
/// Every node starts with its own label (a seeded permutation of node ids). A node keeps its label while it is
/// among the most frequent neighbor labels, otherwise it takes the smallest
/// of the most frequent ones. Isolated nodes keep their own label.
pub fn detect_label_propagation(net: &SocialNetwork, seed: u64) -> Result<LabelPropagationOutcome> {
    let n = net.n();
    if n == 0 {
        return Err(Error::InvalidParameter("community detection on an empty network".into()));
    }
    let mut rng = rng::stream(seed);
    // Initial labels are a seeded permutation so that smallest-label tie
    // breaking carries no bias toward low node ids.
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let mut counts = vec![0usize; n];
    let mut touched = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        order.shuffle(&mut rng);
        let mut changed = false;
        for &u in &order {
            let neighbors = net.adj(u);
            if neighbors.is_empty() {
                continue;
            }
            for &v in neighbors {
                let l = labels[v];
                if counts[l] == 0 {
                    touched.push(l);
                }
                counts[l] += 1;
            }
            let top = touched.iter().map(|&l| counts[l]).max().unwrap_or(0);
            let current = labels[u];
            let next = if counts[current] == top {
                current
            } else {
                touched
                    .iter()
                    .copied()
                    .filter(|&l| counts[l] == top)
                    .min()
                    .unwrap_or(current)
            };
            for &l in &touched {
                counts[l] = 0;
            }
            touched.clear();
            if next != current {
                labels[u] = next;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("label propagation did not settle within {MAX_SWEEPS} sweeps");
    }
    Ok(LabelPropagationOutcome {
        partition: Partition::from_labels(&labels)?,
        sweeps,
        converged,
    })
}

/// True when every non-isolated node holds a plurality label of its neighbors.
pub fn is_plurality_fixed_point(net: &SocialNetwork, part: &Partition) -> bool {
    (0..net.n()).all(|u| {
        let neighbors = net.adj(u);
        if neighbors.is_empty() {
            return true;
        }
        let mut counts = std::collections::HashMap::new();
        for &v in neighbors {
            *counts.entry(part.community_of(v)).or_insert(0usize) += 1;
        }
        let top = counts.values().copied().max().unwrap_or(0);
        counts.get(&part.community_of(u)).copied().unwrap_or(0) == top
    })
}
