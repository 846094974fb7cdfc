//! Community partitions and detectors.
//!
//! Detection always runs on the unweighted network. [`Partition`] does not
//! know which algorithm produced it, so further detectors can be added behind
//! the [`Detector`] enum without touching downstream code.

mod label_propagation;
mod louvain;
mod modularity;
mod partition;

pub use label_propagation::{
    detect_label_propagation, is_plurality_fixed_point, LabelPropagationOutcome, MAX_SWEEPS,
};
pub use louvain::{detect_louvain, detect_louvain_with};
pub use modularity::{modularity, modularity_with_resolution};
pub use partition::{read_partition, write_partition, CommunityId, Partition};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::SocialNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    Louvain,
    LabelPropagation,
}

impl Detector {
    pub fn detect(self, net: &SocialNetwork, seed: u64) -> Result<Partition> {
        match self {
            Detector::Louvain => detect_louvain(net, seed),
            Detector::LabelPropagation => Ok(detect_label_propagation(net, seed)?.partition),
        }
    }
}
