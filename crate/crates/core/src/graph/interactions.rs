use serde::{Deserialize, Serialize};

use super::{IdMap, NodeId};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Retweet,
    Mention,
}

/// One interaction as it appears on disk, with external ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawInteraction {
    pub actor: String,
    pub target: String,
    pub kind: InteractionKind,
    pub ts: i64,
    /// Memes carried by the interaction; empty for untagged chatter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub memes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionEvent {
    pub actor: NodeId,
    pub target: NodeId,
    pub kind: InteractionKind,
    pub ts: i64,
    pub memes: Vec<String>,
}

impl InteractionEvent {
    pub fn mentions_meme(&self, meme: &str) -> bool {
        self.memes.iter().any(|m| m == meme)
    }
}

/// Interaction events sorted by timestamp; equal timestamps keep input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InteractionLog {
    events: Vec<InteractionEvent>,
    self_interactions_dropped: usize,
}

impl InteractionLog {
    /// Sorts stably by timestamp and drops events whose actor is their target.
    pub fn new(events: impl IntoIterator<Item = InteractionEvent>) -> Self {
        let mut dropped = 0;
        let mut events: Vec<InteractionEvent> = events
            .into_iter()
            .filter(|e| {
                let keep = e.actor != e.target;
                if !keep {
                    dropped += 1;
                }
                keep
            })
            .collect();
        events.sort_by_key(|e| e.ts);
        Self {
            events,
            self_interactions_dropped: dropped,
        }
    }

    /// Resolve raw events against an id map; unknown ids are an error.
    pub fn from_raw(raw: &[RawInteraction], ids: &IdMap) -> Result<Self> {
        let events = raw
            .iter()
            .map(|r| {
                Ok(InteractionEvent {
                    actor: ids.resolve(&r.actor)?,
                    target: ids.resolve(&r.target)?,
                    kind: r.kind,
                    ts: r.ts,
                    memes: r.memes.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(events))
    }

    pub fn to_raw(&self, ids: &IdMap) -> Vec<RawInteraction> {
        self.events
            .iter()
            .map(|e| RawInteraction {
                actor: ids.label(e.actor).to_string(),
                target: ids.label(e.target).to_string(),
                kind: e.kind,
                ts: e.ts,
                memes: e.memes.clone(),
            })
            .collect()
    }

    pub fn events(&self) -> &[InteractionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn self_interactions_dropped(&self) -> usize {
        self.self_interactions_dropped
    }
}
