//! Community structure and meme virality.
//!
//! The crate measures how strongly memes concentrate inside network
//! communities, simulates the four baseline diffusion models used as null
//! references, and predicts virality from early community-level spreading
//! patterns with a random forest.
//!
//! Module map:
//!
//! - [`graph`]: social network construction and the interaction log.
//! - [`community`]: partitions, Louvain and label propagation detectors.
//! - [`cascade`]: meme traces, models M1 to M4, subsampling and ensembles.
//! - [`metrics`]: dominance, entropy, exposures, communication flow.
//! - [`predictor`]: early-stage features, viral labels, forest, evaluation.
//! - [`synthgen`]: planted-partition worlds with planted simple and complex memes.

pub mod cascade;
pub mod community;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod predictor;
pub mod rng;
pub mod stats;
pub mod synthgen;

pub use error::{Error, Result};
