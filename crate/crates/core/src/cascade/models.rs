use std::cmp::Reverse;
use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{CascadeParams, MemeTrace};
use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialNetwork};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum M1Mode {
    /// Authors drawn with replacement, one event per draw.
    Tweets,
    /// Distinct users drawn without replacement, one event each.
    Users,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    M1(M1Mode),
    M2,
    M3,
    M4,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::M1(M1Mode::Tweets) => "M1-tweets",
            Model::M1(M1Mode::Users) => "M1-users",
            Model::M2 => "M2",
            Model::M3 => "M3",
            Model::M4 => "M4",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m1" | "m1-tweets" => Ok(Model::M1(M1Mode::Tweets)),
            "m1-users" => Ok(Model::M1(M1Mode::Users)),
            "m2" => Ok(Model::M2),
            "m3" => Ok(Model::M3),
            "m4" => Ok(Model::M4),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}

/// Run `model` with a stream seeded from `params.seed`.
pub fn simulate(net: &SocialNetwork, partition: Option<&Partition>, model: Model, params: &CascadeParams) -> Result<MemeTrace> {
    simulate_with_rng(net, partition, model, params, &mut rng::stream(params.seed))
}

/// Run `model` drawing from a caller-owned stream. Sharing one stream
/// between models gives paired simulations.
pub fn simulate_with_rng(
    net: &SocialNetwork,
    partition: Option<&Partition>,
    model: Model,
    params: &CascadeParams,
    rng: &mut Rng,
) -> Result<MemeTrace> {
    params.validate()?;
    if net.n() == 0 {
        return Err(Error::InvalidParameter("simulation on an empty network".into()));
    }
    let total = params.total_events();
    let users = match model {
        Model::M1(mode) => m1_users(net.n(), total, mode, rng)?,
        Model::M2 => {
            require_edges(net)?;
            let start = rng.random_range(0..net.n());
            walk(net.n(), |u| net.adj(u), params.p, total, start, rng)
        }
        Model::M3 => {
            require_edges(net)?;
            let start = rng.random_range(0..net.n());
            reinforced(net, params.p, total, start, rng)
        }
        Model::M4 => {
            require_edges(net)?;
            let part = partition.ok_or_else(|| Error::InvalidParameter("M4 needs a partition".into()))?;
            let lists = same_community_neighbors(net, part)?;
            let start = rng.random_range(0..net.n());
            walk(net.n(), |u| lists[u].as_slice(), params.p, total, start, rng)
        }
    };
    Ok(MemeTrace::from_users(model.name(), users))
}

pub fn simulate_m1(net: &SocialNetwork, params: &CascadeParams, mode: M1Mode) -> Result<MemeTrace> {
    simulate(net, None, Model::M1(mode), params)
}

pub fn simulate_m2(net: &SocialNetwork, params: &CascadeParams) -> Result<MemeTrace> {
    simulate(net, None, Model::M2, params)
}

pub fn simulate_m3(net: &SocialNetwork, params: &CascadeParams) -> Result<MemeTrace> {
    simulate(net, None, Model::M3, params)
}

pub fn simulate_m4(net: &SocialNetwork, partition: &Partition, params: &CascadeParams) -> Result<MemeTrace> {
    simulate(net, Some(partition), Model::M4, params)
}

/// M2 started from a fixed first seed user.
pub fn simulate_m2_from(net: &SocialNetwork, params: &CascadeParams, start: NodeId) -> Result<MemeTrace> {
    params.validate()?;
    require_edges(net)?;
    check_node(net, start)?;
    let mut rng = rng::stream(params.seed);
    let users = walk(net.n(), |u| net.adj(u), params.p, params.total_events(), start, &mut rng);
    Ok(MemeTrace::from_users("M2", users))
}

/// M3 started from a fixed first seed user.
pub fn simulate_m3_from(net: &SocialNetwork, params: &CascadeParams, start: NodeId) -> Result<MemeTrace> {
    params.validate()?;
    require_edges(net)?;
    check_node(net, start)?;
    let mut rng = rng::stream(params.seed);
    let users = reinforced(net, params.p, params.total_events(), start, &mut rng);
    Ok(MemeTrace::from_users("M3", users))
}

/// M4 started from a fixed first seed user.
pub fn simulate_m4_from(
    net: &SocialNetwork,
    partition: &Partition,
    params: &CascadeParams,
    start: NodeId,
) -> Result<MemeTrace> {
    params.validate()?;
    require_edges(net)?;
    check_node(net, start)?;
    let lists = same_community_neighbors(net, partition)?;
    let mut rng = rng::stream(params.seed);
    let users = walk(net.n(), |u| lists[u].as_slice(), params.p, params.total_events(), start, &mut rng);
    Ok(MemeTrace::from_users("M4", users))
}

fn require_edges(net: &SocialNetwork) -> Result<()> {
    if net.edge_count() == 0 {
        return Err(Error::InvalidParameter("cascade models need at least one edge".into()));
    }
    Ok(())
}

fn check_node(net: &SocialNetwork, u: NodeId) -> Result<()> {
    if u >= net.n() {
        return Err(Error::NodeOutOfRange(u));
    }
    Ok(())
}

fn m1_users(n: usize, total: usize, mode: M1Mode, rng: &mut Rng) -> Result<Vec<NodeId>> {
    match mode {
        M1Mode::Tweets => Ok((0..total).map(|_| rng.random_range(0..n)).collect()),
        M1Mode::Users => {
            if total > n {
                return Err(Error::SampleTooLarge {
                    requested: total,
                    available: n,
                });
            }
            Ok(rand::seq::index::sample(rng, n, total).into_vec())
        }
    }
}

fn same_community_neighbors(net: &SocialNetwork, part: &Partition) -> Result<Vec<Vec<NodeId>>> {
    part.check_covers(net.n())?;
    Ok((0..net.n())
        .map(|u| {
            let c = part.community_of(u);
            net.adj(u)
                .iter()
                .copied()
                .filter(|&v| part.community_of(v) == c)
                .collect()
        })
        .collect())
}

/// Shared M2/M4 dynamics over per-node candidate lists.
///
/// Each step draws a uniform `x`; when `x < p` and some infected node has a
/// candidate, a uniform such node passes the meme to a uniform candidate,
/// who tweets. Otherwise a uniform random user restarts the process and
/// tweets. Infected users can be chosen again and tweet repeatedly.
fn walk<'a, F>(n: usize, candidates: F, p: f64, total: usize, start: NodeId, rng: &mut Rng) -> Vec<NodeId>
where
    F: Fn(NodeId) -> &'a [NodeId],
{
    let mut events = Vec::with_capacity(total);
    let mut infected = vec![false; n];
    let mut spreaders: Vec<NodeId> = Vec::new();
    let mut emit = |v: NodeId, events: &mut Vec<NodeId>, spreaders: &mut Vec<NodeId>| {
        events.push(v);
        if !infected[v] {
            infected[v] = true;
            if !candidates(v).is_empty() {
                spreaders.push(v);
            }
        }
    };
    if total == 0 {
        return events;
    }
    emit(start, &mut events, &mut spreaders);
    while events.len() < total {
        let x: f64 = rng.random();
        if x < p && !spreaders.is_empty() {
            let u = spreaders[rng.random_range(0..spreaders.len())];
            let list = candidates(u);
            let v = list[rng.random_range(0..list.len())];
            emit(v, &mut events, &mut spreaders);
        } else {
            let s = rng.random_range(0..n);
            emit(s, &mut events, &mut spreaders);
        }
    }
    events
}

/// M3 dynamics: on a spreading step the user with the most infected
/// neighbors tweets (infected users included, ties to the lowest id).
fn reinforced(net: &SocialNetwork, p: f64, total: usize, start: NodeId, rng: &mut Rng) -> Vec<NodeId> {
    let n = net.n();
    let mut events = Vec::with_capacity(total);
    let mut infected = vec![false; n];
    let mut exposure = vec![0usize; n];
    // ordered by (most infected neighbors, lowest id)
    let mut candidates: BTreeSet<(Reverse<usize>, NodeId)> = BTreeSet::new();

    let mut emit = |v: NodeId, events: &mut Vec<NodeId>, candidates: &mut BTreeSet<(Reverse<usize>, NodeId)>| {
        events.push(v);
        if infected[v] {
            return;
        }
        infected[v] = true;
        for &w in net.adj(v) {
            if exposure[w] > 0 {
                candidates.remove(&(Reverse(exposure[w]), w));
            }
            exposure[w] += 1;
            candidates.insert((Reverse(exposure[w]), w));
        }
    };
    if total == 0 {
        return events;
    }
    emit(start, &mut events, &mut candidates);
    while events.len() < total {
        let x: f64 = rng.random();
        match candidates.first() {
            Some(&(_, v)) if x < p => emit(v, &mut events, &mut candidates),
            _ => {
                let s = rng.random_range(0..n);
                emit(s, &mut events, &mut candidates);
            }
        }
    }
    events
}
