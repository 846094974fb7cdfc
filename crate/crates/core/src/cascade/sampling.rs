use super::{MemeTrace, TraceEvent};
use crate::error::{Error, Result};
use crate::rng;

/// Keep `ceil(rate * len)` events chosen uniformly without replacement.
///
/// Event order is preserved and `seq` is renumbered from 0; timestamps are
/// kept. An empty input gives an empty trace, which the metrics reject.
pub fn subsample(trace: &MemeTrace, rate: f64, seed: u64) -> Result<MemeTrace> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!("sample rate must lie in (0, 1], got {rate}")));
    }
    let len = trace.len();
    let keep = sample_size(len, rate);
    let mut picked = if keep == len {
        (0..len).collect()
    } else {
        rand::seq::index::sample(&mut rng::stream(seed), len, keep).into_vec()
    };
    picked.sort_unstable();
    let events = picked
        .into_iter()
        .enumerate()
        .map(|(i, idx)| TraceEvent {
            seq: i as u64,
            ..trace.events()[idx]
        })
        .collect();
    MemeTrace::from_events(trace.meme_id.clone(), events)
}

fn sample_size(len: usize, rate: f64) -> usize {
    // tolerance absorbs representation error, e.g. 0.1 * 500
    (((len as f64) * rate - 1e-9).ceil().max(0.0) as usize).min(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_one_is_identity() {
        let t = MemeTrace::from_users("m", [4, 2, 2, 9]);
        assert_eq!(subsample(&t, 1.0, 7).unwrap(), t);
    }

    #[test]
    fn exact_count() {
        let t = MemeTrace::from_users("m", 0..500);
        let s = subsample(&t, 0.1, 3).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.events().windows(2).all(|w| w[0].ts < w[1].ts));
        assert_eq!(s.events().last().unwrap().seq, 49);
        assert_eq!(sample_size(3, 0.1), 1);
        assert_eq!(sample_size(0, 0.5), 0);
    }

    #[test]
    fn bad_rate() {
        let t = MemeTrace::from_users("m", 0..5);
        assert!(subsample(&t, 0.0, 0).is_err());
        assert!(subsample(&t, 1.5, 0).is_err());
    }
}
