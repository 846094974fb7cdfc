use std::collections::HashMap;

use crate::cascade::MemeTrace;

/// Prior-period tweet count at or above which a meme is not new.
pub const NEW_MEME_THRESHOLD: usize = 20;

/// Keep memes whose prior-period count is below `threshold`; memes absent
/// from `history` count as 0.
pub fn new_meme_filter(traces: Vec<MemeTrace>, history: &HashMap<String, usize>, threshold: usize) -> Vec<MemeTrace> {
    traces
        .into_iter()
        .filter(|t| history.get(&t.meme_id).copied().unwrap_or(0) < threshold)
        .collect()
}
