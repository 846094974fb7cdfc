//! Raw data ingestion: follow edges plus tweet JSON lines.
//!
//! Tweet lines look like
//! `{"user": "a", "ts": 1700000000, "hashtags": ["x"], "retweet_of": "b", "mentions": ["c"]}`;
//! only `user` and `ts` are required. Hashtags are lower-cased and stripped
//! of a leading `#`; repeats inside one tweet count once.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use memecomm::cascade::{MemeTrace, TraceEvent};
use memecomm::graph::io::read_edge_list_into;
use memecomm::graph::{BuildMode, BuildReport, InteractionEvent, InteractionKind, InteractionLog, NetworkBuilder, SocialNetwork};
use memecomm::metrics::new_meme_filter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub user: String,
    pub ts: i64,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub retweet_of: Option<String>,
    #[serde(default)]
    pub mentions: Vec<String>,
}

impl TweetRecord {
    /// Normalized, deduplicated hashtags in their original order.
    pub fn memes(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.hashtags
            .iter()
            .map(|h| h.trim().trim_start_matches('#').to_lowercase())
            .filter(|h| !h.is_empty() && seen.insert(h.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub build_mode: BuildMode,
    pub new_meme_threshold: usize,
    pub max_unparseable: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParseStats {
    pub lines: usize,
    pub parsed: usize,
    /// 1-based numbers of lines that failed to parse.
    pub bad_lines: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub network: BuildReport,
    pub nodes: usize,
    pub edges: usize,
    /// Tweet authors or interaction targets absent from the edge list, kept
    /// as isolated nodes.
    pub users_only_in_tweets: usize,
    pub tweets: ParseStats,
    pub history: Option<ParseStats>,
    pub tweets_without_hashtags: usize,
    pub memes_seen: usize,
    /// Memes dropped because they were already active in the history period.
    pub memes_not_new: usize,
    pub memes_kept: usize,
    pub trace_events: usize,
    pub interactions: usize,
    pub self_interactions_dropped: usize,
}

pub struct Ingested {
    pub network: SocialNetwork,
    pub traces: Vec<MemeTrace>,
    pub log: InteractionLog,
    pub report: IngestReport,
}

/// Parse tweet lines, skipping blanks. Bad lines are logged and counted;
/// more than `max_bad` of them (as a share of non-blank lines) is an error.
pub fn parse_tweets<R: BufRead>(reader: R, source: &str, max_bad: f64) -> Result<(Vec<TweetRecord>, ParseStats)> {
    let mut stats = ParseStats::default();
    let mut tweets = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.lines += 1;
        match serde_json::from_str::<TweetRecord>(&line) {
            Ok(t) => tweets.push(t),
            Err(e) => {
                log::warn!("{source} line {}: {e}", i + 1);
                stats.bad_lines.push(i + 1);
            }
        }
    }
    stats.parsed = tweets.len();
    let bad = stats.bad_lines.len();
    if bad as f64 > max_bad * stats.lines as f64 {
        bail!(
            "{source}: {bad} of {} lines unparseable (limit {}%), first at line {}",
            stats.lines,
            max_bad * 100.0,
            stats.bad_lines[0]
        );
    }
    Ok((tweets, stats))
}

pub fn ingest<E: BufRead, T: BufRead, H: BufRead>(
    edges: E,
    tweets: T,
    history: Option<H>,
    opts: &IngestOptions,
) -> Result<Ingested> {
    let mut builder = NetworkBuilder::new();
    read_edge_list_into(edges, &mut builder)?;
    let from_edges = builder.node_count();

    let (mut tweets, tweet_stats) = parse_tweets(tweets, "tweets", opts.max_unparseable)?;
    // stable: equal timestamps keep file order
    tweets.sort_by_key(|t| t.ts);

    for t in &tweets {
        builder.add_node(&t.user);
        if let Some(r) = &t.retweet_of {
            builder.add_node(r);
        }
        for m in &t.mentions {
            builder.add_node(m);
        }
    }
    let users_only_in_tweets = builder.node_count() - from_edges;
    let (network, build_report) = builder.build(opts.build_mode);
    let ids = network.ids();

    let mut order: Vec<String> = Vec::new();
    let mut events: HashMap<String, Vec<TraceEvent>> = HashMap::new();
    let mut interactions = Vec::new();
    let mut without_tags = 0;
    for t in &tweets {
        let user = ids.resolve(&t.user)?;
        let memes = t.memes();
        if memes.is_empty() {
            without_tags += 1;
        }
        for m in &memes {
            let list = events.entry(m.clone()).or_insert_with(|| {
                order.push(m.clone());
                Vec::new()
            });
            list.push(TraceEvent {
                seq: list.len() as u64,
                user,
                ts: t.ts,
            });
        }
        let targets = t
            .retweet_of
            .iter()
            .map(|r| (r, InteractionKind::Retweet))
            .chain(t.mentions.iter().map(|m| (m, InteractionKind::Mention)));
        for (target, kind) in targets {
            interactions.push(InteractionEvent {
                actor: user,
                target: ids.resolve(target)?,
                kind,
                ts: t.ts,
                memes: memes.clone(),
            });
        }
    }
    let traces = order
        .into_iter()
        .map(|m| {
            let ev = events.remove(&m).unwrap_or_default();
            MemeTrace::from_events(m, ev)
        })
        .collect::<memecomm::Result<Vec<_>>>()?;
    let memes_seen = traces.len();

    let (traces, history_stats) = match history {
        Some(h) => {
            let (past, stats) = parse_tweets(h, "history", opts.max_unparseable)?;
            let mut counts: HashMap<String, usize> = HashMap::new();
            for t in &past {
                for m in t.memes() {
                    *counts.entry(m).or_insert(0) += 1;
                }
            }
            (new_meme_filter(traces, &counts, opts.new_meme_threshold), Some(stats))
        }
        None => (traces, None),
    };

    let log = InteractionLog::new(interactions);
    let report = IngestReport {
        network: build_report,
        nodes: network.n(),
        edges: network.edge_count(),
        users_only_in_tweets,
        tweets: tweet_stats,
        history: history_stats,
        tweets_without_hashtags: without_tags,
        memes_seen,
        memes_not_new: memes_seen - traces.len(),
        memes_kept: traces.len(),
        trace_events: traces.iter().map(MemeTrace::len).sum(),
        interactions: log.len(),
        self_interactions_dropped: log.self_interactions_dropped(),
    };
    Ok(Ingested {
        network,
        traces,
        log,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EDGES: &str = "a\tb\nb\ta\nb\tc\nc\tb\na\tc\n";

    fn opts() -> IngestOptions {
        IngestOptions {
            build_mode: BuildMode::Reciprocal,
            new_meme_threshold: 20,
            max_unparseable: 0.01,
        }
    }

    fn run(tweets: &str, history: Option<&str>) -> Result<Ingested> {
        ingest(EDGES.as_bytes(), tweets.as_bytes(), history.map(str::as_bytes), &opts())
    }

    #[test]
    fn hashtags_split_into_traces() {
        let tweets = r##"{"user":"a","ts":2,"hashtags":["#X","y"]}
{"user":"b","ts":1,"hashtags":["x"]}
{"user":"c","ts":3,"hashtags":[],"retweet_of":"a"}
"##;
        let out = run(tweets, None).unwrap();
        let ids: Vec<_> = out.traces.iter().map(|t| (t.meme_id.as_str(), t.len())).collect();
        assert_eq!(ids, [("x", 2), ("y", 1)]);
        // time order, not file order
        assert_eq!(out.network.label(out.traces[0].events()[0].user), "b");
        assert_eq!(out.report.tweets_without_hashtags, 1);
        // the untagged retweet still counts as an interaction
        assert_eq!(out.log.len(), 1);
        assert!(out.log.events()[0].memes.is_empty());
    }

    #[test]
    fn reciprocal_edges_and_tweet_only_users() {
        let out = run(r#"{"user":"z","ts":0,"hashtags":["q"],"mentions":["w"]}"#, None).unwrap();
        // a-c is one-directional
        assert_eq!(out.network.edge_count(), 2);
        assert_eq!(out.report.network.unreciprocated, 1);
        assert_eq!(out.report.users_only_in_tweets, 2);
        assert_eq!(out.network.n(), 5);
        assert!(out.network.neighbors(out.network.ids().get("z").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn history_filters_old_memes() {
        let tweets = r#"{"user":"a","ts":0,"hashtags":["old","new"]}"#;
        let history: String = (0..20).map(|i| format!("{{\"user\":\"a\",\"ts\":{i},\"hashtags\":[\"old\"]}}\n")).collect();
        let out = run(tweets, Some(&history)).unwrap();
        let ids: Vec<_> = out.traces.iter().map(|t| t.meme_id.as_str()).collect();
        assert_eq!(ids, ["new"]);
        assert_eq!(out.report.memes_not_new, 1);
    }

    #[test]
    fn unparseable_share_is_bounded() {
        let mut good: String = (0..199).map(|i| format!("{{\"user\":\"a\",\"ts\":{i},\"hashtags\":[\"x\"]}}\n")).collect();
        good.push_str("{broken\n");
        let out = run(&good, None).unwrap();
        assert_eq!(out.report.tweets.bad_lines, [200]);
        good.push_str("also broken\n");
        good.push_str("{\"user\": 3}\n");
        let err = run(&good, None).err().unwrap().to_string();
        assert!(err.contains("3 of 202 lines unparseable"), "{err}");
        assert!(err.contains("first at line 200"), "{err}");
    }
}
