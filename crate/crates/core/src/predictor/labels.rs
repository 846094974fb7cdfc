use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Popularity measure used for viral labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Total tweets (`theta_T`).
    Tweets,
    /// Distinct adopters (`theta_U`).
    Users,
}

impl LabelMode {
    pub fn tag(self) -> &'static str {
        match self {
            LabelMode::Tweets => "T",
            LabelMode::Users => "U",
        }
    }
}

pub const MIN_MEMES: usize = 10;

/// Nearest-rank `theta`-th percentile of `values`.
pub fn nearest_rank_threshold(values: &[usize], theta: f64) -> Result<usize> {
    if values.len() < MIN_MEMES {
        return Err(Error::TooFewMemes {
            required: MIN_MEMES,
            got: values.len(),
        });
    }
    if !(theta > 0.0 && theta < 100.0) {
        return Err(Error::InvalidParameter(format!("percentile must lie in (0, 100), got {theta}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = ((theta / 100.0) * sorted.len() as f64 - 1e-9).ceil().max(1.0) as usize;
    Ok(sorted[rank.min(sorted.len()) - 1])
}

/// A meme is viral when its popularity strictly exceeds the nearest-rank
/// `theta`-th percentile over all memes.
pub fn label_viral(popularity: &[usize], theta: f64) -> Result<Vec<bool>> {
    let cut = nearest_rank_threshold(popularity, theta)?;
    Ok(popularity.iter().map(|&p| p > cut).collect())
}
