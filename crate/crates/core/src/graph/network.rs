use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::NodeId;
use crate::error::{Error, Result};

/// Bijective map between external string ids and dense node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0"`, `"1"`, ... for generated networks.
    pub fn sequential(n: usize) -> Self {
        let mut map = Self::new();
        for i in 0..n {
            map.intern(&i.to_string());
        }
        map
    }

    /// Index for `label`, allocating the next dense id if it is new.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn resolve(&self, label: &str) -> Result<NodeId> {
        self.get(label)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    /// Input pairs are directed follows; keep an edge only when both
    /// directions are present.
    Reciprocal,
    /// Every pair becomes an undirected edge.
    AsIs,
}

/// Counters collected while building a network.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub pairs: usize,
    pub self_loops_skipped: usize,
    pub unreciprocated: usize,
    pub duplicates: usize,
}

/// Undirected, unweighted graph with sorted, deduplicated adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialNetwork {
    ids: IdMap,
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub n: usize,
    pub m: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl SocialNetwork {
    /// Network over nodes labelled `"0".."n-1"` from undirected index pairs.
    /// Self-loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange(u));
            }
            if v >= n {
                return Err(Error::NodeOutOfRange(v));
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        Ok(Self::from_adjacency_lists(IdMap::sequential(n), adjacency))
    }

    fn from_adjacency_lists(ids: IdMap, mut adjacency: Vec<Vec<NodeId>>) -> Self {
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Self {
            ids,
            adjacency,
            edge_count: twice / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    pub fn label(&self, u: NodeId) -> &str {
        self.ids.label(u)
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.adjacency
            .get(u)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange(u))
    }

    /// Unchecked variant of [`neighbors`](Self::neighbors); panics when `u` is out of range.
    #[inline]
    pub fn adj(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let n = self.n();
        if n == 0 {
            return DegreeStats {
                n: 0,
                m: 0,
                min: 0,
                max: 0,
                mean: 0.0,
            };
        }
        let degrees = self.adjacency.iter().map(Vec::len);
        DegreeStats {
            n,
            m: self.edge_count,
            min: degrees.clone().min().unwrap_or(0),
            max: degrees.max().unwrap_or(0),
            mean: 2.0 * self.edge_count as f64 / n as f64,
        }
    }
}

/// Incremental builder over external string ids.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    ids: IdMap,
    pairs: Vec<(NodeId, NodeId)>,
    self_loops: usize,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declare a node; nodes without edges are kept as isolated nodes.
    pub fn add_node(&mut self, label: &str) -> NodeId {
        self.ids.intern(label)
    }

    /// Nodes declared so far.
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Record a pair. Self-pairs are skipped and counted.
    pub fn add_pair(&mut self, u: &str, v: &str) {
        let u = self.ids.intern(u);
        let v = self.ids.intern(v);
        if u == v {
            self.self_loops += 1;
        } else {
            self.pairs.push((u, v));
        }
    }

    pub fn build(self, mode: BuildMode) -> (SocialNetwork, BuildReport) {
        let n = self.ids.len();
        let mut report = BuildReport {
            pairs: self.pairs.len() + self.self_loops,
            self_loops_skipped: self.self_loops,
            ..Default::default()
        };
        let mut adjacency = vec![Vec::new(); n];
        match mode {
            BuildMode::AsIs => {
                let mut seen = std::collections::HashSet::new();
                for &(u, v) in &self.pairs {
                    let key = (u.min(v), u.max(v));
                    if seen.insert(key) {
                        adjacency[u].push(v);
                        adjacency[v].push(u);
                    } else {
                        report.duplicates += 1;
                    }
                }
            }
            BuildMode::Reciprocal => {
                let mut directed: Vec<(NodeId, NodeId)> = self.pairs.clone();
                directed.sort_unstable();
                let before = directed.len();
                directed.dedup();
                report.duplicates = before - directed.len();
                for &(u, v) in &directed {
                    if directed.binary_search(&(v, u)).is_ok() {
                        if u < v {
                            adjacency[u].push(v);
                            adjacency[v].push(u);
                        }
                    } else {
                        report.unreciprocated += 1;
                    }
                }
            }
        }
        (SocialNetwork::from_adjacency_lists(self.ids, adjacency), report)
    }
}

/// Build a network from external-id pairs.
pub fn build_network<I, S>(pairs: I, mode: BuildMode) -> (SocialNetwork, BuildReport)
where
    I: IntoIterator<Item = (S, S)>,
    S: AsRef<str>,
{
    let mut builder = NetworkBuilder::new();
    for (u, v) in pairs {
        builder.add_pair(u.as_ref(), v.as_ref());
    }
    builder.build(mode)
}
