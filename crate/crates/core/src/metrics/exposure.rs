use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::concentration::non_empty;
use crate::cascade::MemeTrace;
use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExposureMode {
    /// Count prior neighbor tweets.
    Tweets,
    /// Count distinct prior neighbor authors.
    Users,
}

/// Mean number of exposures an adopter saw before their first tweet.
///
/// An exposure is any event by a network neighbor strictly earlier in the
/// trace than the adopter's first event.
pub fn average_exposures(trace: &MemeTrace, net: &SocialNetwork, mode: ExposureMode) -> Result<f64> {
    non_empty(trace)?;
    let mut tweets_so_far: HashMap<NodeId, usize> = HashMap::new();
    let mut total = 0usize;
    let mut adopters = 0usize;
    for u in trace.users() {
        if u >= net.n() {
            return Err(Error::NodeOutOfRange(u));
        }
        if !tweets_so_far.contains_key(&u) {
            adopters += 1;
            let neighbors = net.adj(u);
            let exposures = if neighbors.len() <= tweets_so_far.len() {
                neighbors
                    .iter()
                    .filter_map(|v| tweets_so_far.get(v))
                    .map(|&k| count(k, mode))
                    .sum::<usize>()
            } else {
                tweets_so_far
                    .iter()
                    .filter(|(v, _)| neighbors.binary_search(v).is_ok())
                    .map(|(_, &k)| count(k, mode))
                    .sum()
            };
            total += exposures;
        }
        *tweets_so_far.entry(u).or_insert(0) += 1;
    }
    Ok(total as f64 / adopters as f64)
}

fn count(tweets: usize, mode: ExposureMode) -> usize {
    match mode {
        ExposureMode::Tweets => tweets,
        ExposureMode::Users => usize::from(tweets > 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_example() {
        // a=0 - b=1 - c=2, events [a, c, b]
        let net = SocialNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = MemeTrace::from_users("h", [0, 2, 1]);
        let nt = average_exposures(&t, &net, ExposureMode::Tweets).unwrap();
        let nu = average_exposures(&t, &net, ExposureMode::Users).unwrap();
        assert!((nt - 2.0 / 3.0).abs() < 1e-12);
        assert!((nu - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_prior_neighbor() {
        let net = SocialNetwork::from_edges(2, &[(0, 1)]).unwrap();
        let t = MemeTrace::from_users("h", [0, 1]);
        assert_eq!(average_exposures(&t, &net, ExposureMode::Tweets).unwrap(), 0.5);
    }

    #[test]
    fn repeated_tweets_vs_users() {
        let net = SocialNetwork::from_edges(2, &[(0, 1)]).unwrap();
        let t = MemeTrace::from_users("h", [0, 0, 0, 0, 0, 1]);
        // center contributes 0, leaf sees 5 tweets from 1 user
        assert_eq!(average_exposures(&t, &net, ExposureMode::Tweets).unwrap(), 2.5);
        assert_eq!(average_exposures(&t, &net, ExposureMode::Users).unwrap(), 0.5);
    }

    #[test]
    fn non_neighbors_do_not_count() {
        let net = SocialNetwork::from_edges(4, &[(0, 1)]).unwrap();
        let base = MemeTrace::from_users("h", [0, 1]);
        let noisy = MemeTrace::from_users("h", [3, 0, 2, 1]);
        // adopters 3 and 2 contribute 0 exposures; totals differ only by adopter count
        let a = average_exposures(&base, &net, ExposureMode::Tweets).unwrap() * 2.0;
        let b = average_exposures(&noisy, &net, ExposureMode::Tweets).unwrap() * 4.0;
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let net = SocialNetwork::from_edges(2, &[(0, 1)]).unwrap();
        assert!(average_exposures(&MemeTrace::from_users("e", []), &net, ExposureMode::Tweets).is_err());
        assert!(average_exposures(&MemeTrace::from_users("e", [7]), &net, ExposureMode::Tweets).is_err());
    }
}
