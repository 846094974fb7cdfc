use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeParams {
    /// Probability of a spreading step; a restart happens with `1 - p`.
    pub p: f64,
    /// Events wanted after sampling.
    pub target_tweets: usize,
    pub oversample_factor: usize,
    pub sample_rate: f64,
    pub seed: u64,
}

impl Default for CascadeParams {
    fn default() -> Self {
        Self {
            p: 0.85,
            target_tweets: 50,
            oversample_factor: 10,
            sample_rate: 0.10,
            seed: 0,
        }
    }
}

impl CascadeParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if self.target_tweets == 0 {
            return Err(Error::InvalidParameter("target_tweets must be at least 1".into()));
        }
        if self.oversample_factor == 0 {
            return Err(Error::InvalidParameter("oversample_factor must be at least 1".into()));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sample_rate must lie in (0, 1], got {}",
                self.sample_rate
            )));
        }
        Ok(())
    }

    /// Events generated before sampling.
    pub fn total_events(&self) -> usize {
        self.target_tweets * self.oversample_factor
    }
}
