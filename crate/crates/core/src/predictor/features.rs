use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::MemeTrace;
use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{InteractionEvent, InteractionLog, NodeId, SocialNetwork};
use crate::metrics::{early_stage, entropy_of_counts};

/// Column names of the full feature matrix, in order.
pub const FEATURE_NAMES: [&str; 7] = [
    "n_early_adopters",
    "n_uninfected_neighbors",
    "n_infected_communities",
    "usage_entropy",
    "adoption_entropy",
    "frac_intra",
    "frac_intra_present",
];

/// Columns kept by the community-blind baseline.
pub const BLIND_FEATURES: [usize; 2] = [0, 1];

/// Sentinel for a missing intra-community interaction fraction.
const MISSING: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub n_early_adopters: usize,
    pub n_uninfected_neighbors: usize,
    pub n_infected_communities: usize,
    pub usage_entropy: f64,
    pub adoption_entropy: f64,
    /// Share of meme interactions by early adopters that stay inside one
    /// community; `None` without such interactions.
    pub frac_intra: Option<f64>,
    /// Early adopters that are not nodes of the network.
    pub missing_adopters: usize,
    /// Tweets in the early window (below the window size for short traces).
    pub early_tweets: usize,
}

impl FeatureVector {
    pub fn to_row(&self) -> Vec<f64> {
        vec![
            self.n_early_adopters as f64,
            self.n_uninfected_neighbors as f64,
            self.n_infected_communities as f64,
            self.usage_entropy,
            self.adoption_entropy,
            self.frac_intra.unwrap_or(MISSING),
            f64::from(u8::from(self.frac_intra.is_some())),
        ]
    }
}

/// Features of the first `n` tweets of `trace`.
///
/// Interactions count when they carry the meme, their actor is an early
/// adopter, and they happen no later than the last early tweet.
pub fn extract_features(
    trace: &MemeTrace,
    net: &SocialNetwork,
    part: &Partition,
    log: &InteractionLog,
    n: usize,
) -> Result<FeatureVector> {
    let relevant: Vec<&InteractionEvent> = log.events().iter().filter(|e| e.mentions_meme(&trace.meme_id)).collect();
    features_from(trace, net, part, &relevant, n)
}

fn features_from(
    trace: &MemeTrace,
    net: &SocialNetwork,
    part: &Partition,
    interactions: &[&InteractionEvent],
    n: usize,
) -> Result<FeatureVector> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace(trace.meme_id.clone()));
    }
    part.check_covers(net.n())?;
    let window = early_stage(trace, n);
    let adopters = window.adopters();
    let adopter_set: HashSet<NodeId> = adopters.iter().copied().collect();
    let covered = |u: NodeId| u < net.n();
    let missing_adopters = adopters.iter().filter(|&&u| !covered(u)).count();

    let mut uninfected = HashSet::new();
    for &u in adopters.iter().filter(|&&u| covered(u)) {
        uninfected.extend(net.adj(u).iter().copied().filter(|v| !adopter_set.contains(v)));
    }

    let mut tweets = vec![0usize; part.count()];
    let mut users = vec![0usize; part.count()];
    for u in window.users().filter(|&u| covered(u)) {
        tweets[part.community_of(u)] += 1;
    }
    for &u in adopters.iter().filter(|&&u| covered(u)) {
        users[part.community_of(u)] += 1;
    }

    let cutoff = window.events().last().map(|e| e.ts).unwrap_or(i64::MIN);
    let (mut intra, mut total) = (0usize, 0usize);
    for e in interactions {
        if e.ts > cutoff || !adopter_set.contains(&e.actor) || !covered(e.actor) || !covered(e.target) {
            continue;
        }
        total += 1;
        if part.community_of(e.actor) == part.community_of(e.target) {
            intra += 1;
        }
    }

    Ok(FeatureVector {
        n_early_adopters: adopters.len(),
        n_uninfected_neighbors: uninfected.len(),
        n_infected_communities: users.iter().filter(|&&c| c > 0).count(),
        usage_entropy: entropy_of_counts(&tweets),
        adoption_entropy: entropy_of_counts(&users),
        frac_intra: (total > 0).then(|| intra as f64 / total as f64),
        missing_adopters,
        early_tweets: window.len(),
    })
}

/// One meme's features with its final popularity, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub meme_id: String,
    pub features: FeatureVector,
    pub final_tweets: usize,
    pub final_users: usize,
}

impl FeatureRow {
    /// Trace shorter than the early window.
    pub fn short_trace(&self, n: usize) -> bool {
        self.final_tweets < n
    }
}

/// Features for many traces, with the interaction log indexed once.
pub fn extract_all(
    traces: &[MemeTrace],
    net: &SocialNetwork,
    part: &Partition,
    log: &InteractionLog,
    n: usize,
) -> Result<Vec<FeatureRow>> {
    let mut by_meme: HashMap<&str, Vec<&InteractionEvent>> = HashMap::new();
    for e in log.events() {
        for m in &e.memes {
            by_meme.entry(m.as_str()).or_default().push(e);
        }
    }
    traces
        .par_iter()
        .map(|t| {
            let relevant = by_meme.get(t.meme_id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
            Ok(FeatureRow {
                meme_id: t.meme_id.clone(),
                features: features_from(t, net, part, relevant, n)?,
                final_tweets: t.len(),
                final_users: t.adopters().len(),
            })
        })
        .collect()
}

pub const FEATURES_CSV_HEADER: &str = "meme_id,n_early_adopters,n_uninfected_neighbors,n_infected_communities,\
usage_entropy,adoption_entropy,frac_intra,missing_adopters,early_tweets,final_tweets,final_users";

/// Missing `frac_intra` is written as an empty cell.
pub fn write_features_csv<W: Write>(rows: &[FeatureRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = FEATURES_CSV_HEADER.split(',').collect();
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        let f = &r.features;
        w.write_record([
            r.meme_id.clone(),
            f.n_early_adopters.to_string(),
            f.n_uninfected_neighbors.to_string(),
            f.n_infected_communities.to_string(),
            f.usage_entropy.to_string(),
            f.adoption_entropy.to_string(),
            f.frac_intra.map(|x| x.to_string()).unwrap_or_default(),
            f.missing_adopters.to_string(),
            f.early_tweets.to_string(),
            r.final_tweets.to_string(),
            r.final_users.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(input: R) -> Result<Vec<FeatureRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != FEATURES_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected features header, want `{FEATURES_CSV_HEADER}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k).parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("column {} is not a number: {:?}", k + 1, field(k)),
            })
        };
        let count = |k: usize| -> Result<usize> {
            field(k).parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("column {} is not a count: {:?}", k + 1, field(k)),
            })
        };
        rows.push(FeatureRow {
            meme_id: field(0).to_string(),
            features: FeatureVector {
                n_early_adopters: count(1)?,
                n_uninfected_neighbors: count(2)?,
                n_infected_communities: count(3)?,
                usage_entropy: num(4)?,
                adoption_entropy: num(5)?,
                frac_intra: if field(6).is_empty() { None } else { Some(num(6)?) },
                missing_adopters: count(7)?,
                early_tweets: count(8)?,
            },
            final_tweets: count(9)?,
            final_users: count(10)?,
        });
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map(|p| p.line() as usize).unwrap_or(0),
        msg: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::InteractionKind;

    fn rt(actor: NodeId, target: NodeId, ts: i64, meme: &str) -> InteractionEvent {
        InteractionEvent {
            actor,
            target,
            kind: InteractionKind::Retweet,
            ts,
            memes: vec![meme.to_string()],
        }
    }

    #[test]
    fn single_adopter_degenerate() {
        // user 0 with 7 neighbours
        let edges: Vec<_> = (1..=7).map(|v| (0, v)).collect();
        let net = SocialNetwork::from_edges(8, &edges).unwrap();
        let part = Partition::single_community(8).unwrap();
        let trace = MemeTrace::from_users("h", std::iter::repeat_n(0, 50));
        let f = extract_features(&trace, &net, &part, &InteractionLog::default(), 50).unwrap();
        assert_eq!(
            (f.n_early_adopters, f.n_uninfected_neighbors, f.n_infected_communities),
            (1, 7, 1)
        );
        assert_eq!((f.usage_entropy, f.adoption_entropy), (0.0, 0.0));
        assert_eq!(f.frac_intra, None);
        assert_eq!(f.to_row()[5..], [-1.0, 0.0]);
    }

    #[test]
    fn uniform_over_five_communities() {
        let net = SocialNetwork::from_edges(5, &[]).unwrap();
        let part = Partition::singletons(5).unwrap();
        let trace = MemeTrace::from_users("h", (0..50).map(|i| i % 5));
        let f = extract_features(&trace, &net, &part, &InteractionLog::default(), 50).unwrap();
        assert!((f.usage_entropy - 5f64.ln()).abs() < 1e-12);
        assert_eq!(f.n_infected_communities, 5);
    }

    #[test]
    fn mutual_retweets_inside_community() {
        let net = SocialNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let part = Partition::from_labels(&[0, 0, 1]).unwrap();
        let trace = MemeTrace::from_users("h", [0, 1, 0, 1]);
        let log = InteractionLog::new(vec![rt(1, 0, 1, "h"), rt(0, 1, 2, "h"), rt(1, 2, 3, "other")]);
        let f = extract_features(&trace, &net, &part, &log, 50).unwrap();
        assert_eq!(f.frac_intra, Some(1.0));
        assert_eq!(f.n_uninfected_neighbors, 1);
    }

    #[test]
    fn late_interactions_ignored() {
        let net = SocialNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let part = Partition::from_labels(&[0, 0, 1]).unwrap();
        let trace = MemeTrace::from_users("h", [0, 1, 2, 2]);
        let log = InteractionLog::new(vec![rt(1, 0, 1, "h"), rt(2, 1, 3, "h")]);
        let early = extract_features(&trace, &net, &part, &log, 2).unwrap();
        assert_eq!(early.frac_intra, Some(1.0));
        let all = extract_features(&trace, &net, &part, &log, 50).unwrap();
        assert_eq!(all.frac_intra, Some(0.5));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![FeatureRow {
            meme_id: "h,1".into(),
            features: FeatureVector {
                n_early_adopters: 3,
                n_uninfected_neighbors: 9,
                n_infected_communities: 2,
                usage_entropy: 0.5,
                adoption_entropy: 0.25,
                frac_intra: None,
                missing_adopters: 0,
                early_tweets: 50,
            },
            final_tweets: 120,
            final_users: 40,
        }];
        let mut buf = Vec::new();
        write_features_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_features_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn empty_trace_rejected() {
        let net = SocialNetwork::from_edges(1, &[]).unwrap();
        let part = Partition::single_community(1).unwrap();
        let t = MemeTrace::from_users("e", []);
        assert!(extract_features(&t, &net, &part, &InteractionLog::default(), 50).is_err());
    }
}
