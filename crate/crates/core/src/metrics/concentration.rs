use crate::cascade::MemeTrace;
use crate::community::{CommunityId, Partition};
use crate::error::{Error, Result};

/// Number of leading tweets used for every per-meme measure.
pub const DEFAULT_EARLY_STAGE: usize = 50;

/// First `min(n, len)` events of a trace.
pub fn early_stage(trace: &MemeTrace, n: usize) -> MemeTrace {
    trace.prefix(n)
}

/// Share held by the largest community.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub value: f64,
    /// Lowest id among the communities holding the maximum.
    pub community: CommunityId,
    /// More than one community holds the maximum.
    pub tie: bool,
}

pub fn usage_dominance(trace: &MemeTrace, part: &Partition) -> Result<Dominance> {
    non_empty(trace)?;
    dominance(&trace.community_tweet_counts(part)?)
}

pub fn adoption_dominance(trace: &MemeTrace, part: &Partition) -> Result<Dominance> {
    non_empty(trace)?;
    dominance(&trace.community_adopter_counts(part)?)
}

pub fn usage_entropy(trace: &MemeTrace, part: &Partition) -> Result<f64> {
    non_empty(trace)?;
    Ok(entropy_of_counts(&trace.community_tweet_counts(part)?))
}

pub fn adoption_entropy(trace: &MemeTrace, part: &Partition) -> Result<f64> {
    non_empty(trace)?;
    Ok(entropy_of_counts(&trace.community_adopter_counts(part)?))
}

/// Shannon entropy (nats) of the distribution proportional to `counts`.
pub fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / total;
            -q * q.ln()
        })
        .sum();
    // a single non-empty community gives -1 * ln 1 = -0.0
    h.max(0.0)
}

fn dominance(counts: &[usize]) -> Result<Dominance> {
    let total: usize = counts.iter().sum();
    let max = counts.iter().copied().max().unwrap_or(0);
    if total == 0 {
        return Err(Error::EmptyTrace(String::new()));
    }
    let mut winners = counts.iter().enumerate().filter(|(_, &c)| c == max).map(|(i, _)| i);
    let community = winners.next().unwrap_or(0);
    Ok(Dominance {
        value: max as f64 / total as f64,
        community,
        tie: winners.next().is_some(),
    })
}

pub(crate) fn non_empty(trace: &MemeTrace) -> Result<()> {
    if trace.is_empty() {
        Err(Error::EmptyTrace(trace.meme_id.clone()))
    } else {
        Ok(())
    }
}
