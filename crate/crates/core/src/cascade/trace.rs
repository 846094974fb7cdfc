use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::io::{read_jsonl, write_jsonl};
use crate::graph::{IdMap, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub seq: u64,
    pub user: NodeId,
    /// Seconds; simulated traces use `ts == seq`.
    pub ts: i64,
}

/// Time-ordered tweets of one meme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemeTrace {
    pub meme_id: String,
    events: Vec<TraceEvent>,
}

impl MemeTrace {
    /// Trace with `seq = ts = 0, 1, ...` in the given order.
    pub fn from_users(meme_id: impl Into<String>, users: impl IntoIterator<Item = NodeId>) -> Self {
        let events = users
            .into_iter()
            .enumerate()
            .map(|(i, user)| TraceEvent {
                seq: i as u64,
                user,
                ts: i as i64,
            })
            .collect();
        Self {
            meme_id: meme_id.into(),
            events,
        }
    }

    /// Errors unless `seq` is strictly increasing.
    pub fn from_events(meme_id: impl Into<String>, events: Vec<TraceEvent>) -> Result<Self> {
        let meme_id = meme_id.into();
        if events.windows(2).any(|w| w[0].seq >= w[1].seq) {
            return Err(Error::InvalidParameter(format!(
                "trace `{meme_id}`: seq must be strictly increasing"
            )));
        }
        Ok(Self { meme_id, events })
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn users(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.events.iter().map(|e| e.user)
    }

    /// Distinct users in order of their first event.
    pub fn adopters(&self) -> Vec<NodeId> {
        let mut seen = std::collections::HashSet::new();
        self.users().filter(|u| seen.insert(*u)).collect()
    }

    /// Tweets per community, indexed by community id.
    pub fn community_tweet_counts(&self, part: &Partition) -> Result<Vec<usize>> {
        let mut counts = vec![0; part.count()];
        for u in self.users() {
            counts[part.get(u)?] += 1;
        }
        Ok(counts)
    }

    /// Distinct adopters per community, indexed by community id.
    pub fn community_adopter_counts(&self, part: &Partition) -> Result<Vec<usize>> {
        let mut counts = vec![0; part.count()];
        for u in self.adopters() {
            counts[part.get(u)?] += 1;
        }
        Ok(counts)
    }

    /// Keep the first `n` events.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            meme_id: self.meme_id.clone(),
            events: self.events[..n.min(self.events.len())].to_vec(),
        }
    }
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub meme_id: String,
    pub seq: u64,
    pub user: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<i64>,
}

/// Read a JSON-lines trace file. Traces come back in order of first
/// appearance, each sorted by `seq`.
pub fn read_traces<R: BufRead>(reader: R, ids: &IdMap) -> Result<Vec<MemeTrace>> {
    let records: Vec<TraceRecord> = read_jsonl(reader)?;
    let mut order: Vec<String> = Vec::new();
    let mut grouped: HashMap<String, Vec<TraceEvent>> = HashMap::new();
    for r in records {
        let user = ids.resolve(&r.user)?;
        let event = TraceEvent {
            seq: r.seq,
            user,
            ts: r.ts.unwrap_or(r.seq as i64),
        };
        grouped
            .entry(r.meme_id.clone())
            .or_insert_with(|| {
                order.push(r.meme_id.clone());
                Vec::new()
            })
            .push(event);
    }
    order
        .into_iter()
        .map(|id| {
            let mut events = grouped.remove(&id).unwrap_or_default();
            events.sort_by_key(|e| e.seq);
            MemeTrace::from_events(id, events)
        })
        .collect()
}

pub fn write_traces<W: Write>(traces: &[MemeTrace], ids: &IdMap, out: W) -> Result<()> {
    let records: Vec<TraceRecord> = traces
        .iter()
        .flat_map(|t| {
            t.events().iter().map(move |e| TraceRecord {
                meme_id: t.meme_id.clone(),
                seq: e.seq,
                user: ids.label(e.user).to_string(),
                ts: (e.ts != e.seq as i64).then_some(e.ts),
            })
        })
        .collect();
    write_jsonl(&records, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adopters_and_counts() {
        let part = Partition::from_labels(&[0, 0, 1, 1]).unwrap();
        let t = MemeTrace::from_users("h", [0, 2, 0, 3, 2]);
        assert_eq!(t.adopters(), vec![0, 2, 3]);
        assert_eq!(t.community_tweet_counts(&part).unwrap(), vec![2, 3]);
        assert_eq!(t.community_adopter_counts(&part).unwrap(), vec![1, 2]);
    }

    #[test]
    fn seq_must_increase() {
        let e = |seq| TraceEvent { seq, user: 0, ts: 0 };
        assert!(MemeTrace::from_events("x", vec![e(1), e(1)]).is_err());
        assert!(MemeTrace::from_events("x", vec![e(1), e(4)]).is_ok());
    }

    #[test]
    fn file_round_trip() {
        let ids = IdMap::sequential(4);
        let a = MemeTrace::from_users("a", [1, 2, 3]);
        let b = MemeTrace::from_events(
            "b",
            vec![TraceEvent { seq: 0, user: 0, ts: 100 }, TraceEvent { seq: 5, user: 3, ts: 180 }],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_traces(&[a.clone(), b.clone()], &ids, &mut buf).unwrap();
        let back = read_traces(buf.as_slice(), &ids).unwrap();
        assert_eq!(back, vec![a, b]);
    }
}
