//! Planted simple and complex memes.
//!
//! Both kinds share one event loop: with a per-meme repeat probability an
//! existing adopter tweets again (retweeting whoever passed the meme to
//! them), otherwise the meme tries to spread.
//!
//! - simple: M2 dynamics. A random infected user passes the meme to a random
//!   neighbor; with probability `1 - p` a random user starts a new branch.
//! - complex: seeded on one intra-community edge. A neighbor inside the seed
//!   community adopts on first contact; anyone else needs `complex_threshold`
//!   distinct infected neighbors.
//!
//! Every meme first produces `min_tweets` events, so each has a full
//! early-stage window. Simple memes then continue to a power-law draw;
//! complex memes to a truncated geometric whose mean grows with the number
//! of communities reached in that window.

use rand::Rng as _;
use rand_distr::{Distribution, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use crate::cascade::{MemeTrace, TraceEvent};
use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{InteractionEvent, InteractionKind, InteractionLog, NodeId, SocialNetwork};
use crate::rng::{self, Rng};

/// Time span reserved for one meme's events.
const MEME_SPAN: i64 = 10_000_000;
/// Spreading attempts before a complex meme falls back to a repeat tweet.
const MAX_SPREAD_ATTEMPTS: usize = 50;
const MAX_REGENERATIONS: u64 = 10;
const MIN_CASCADE_EVENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contagion {
    Simple,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedCascadeSpec {
    pub n_memes: usize,
    /// Share of memes planted as simple contagions.
    pub simple_fraction: f64,
    /// Spreading probability of simple memes; restarts happen with `1 - p`.
    pub p: f64,
    /// Per-meme repeat-tweet probability is drawn uniformly from this range.
    pub repeat_range: (f64, f64),
    /// Every meme gets at least this many tweets.
    pub min_tweets: usize,
    /// Power-law scale of the simple-meme popularity excess.
    pub simple_scale: f64,
    /// Power-law tail exponent of the simple-meme popularity excess.
    pub simple_alpha: f64,
    pub simple_cap: usize,
    /// Mean of the complex-meme popularity excess per community reached in
    /// the first `min_tweets` events.
    pub complex_mean: f64,
    pub complex_cap: usize,
    /// Distinct infected neighbors needed outside the seed community.
    pub complex_threshold: usize,
    /// Background chatter per intra-community edge relative to inter edges.
    pub intra_rate_multiplier: f64,
    /// Expected background events per inter-community edge.
    pub chatter_rate: f64,
    pub seed: u64,
}

impl Default for PlantedCascadeSpec {
    fn default() -> Self {
        Self {
            n_memes: 600,
            simple_fraction: 0.12,
            p: 0.85,
            repeat_range: (0.3, 0.8),
            min_tweets: 50,
            simple_scale: 100.0,
            simple_alpha: 1.5,
            simple_cap: 5000,
            complex_mean: 10.0,
            complex_cap: 400,
            complex_threshold: 2,
            intra_rate_multiplier: 5.0,
            chatter_rate: 0.5,
            seed: 0,
        }
    }
}

impl PlantedCascadeSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_memes < 10 {
            return bad(format!("n_memes must be at least 10, got {}", self.n_memes));
        }
        if !(0.0..=1.0).contains(&self.simple_fraction) || !(0.0..=1.0).contains(&self.p) {
            return bad("simple_fraction and p must lie in [0, 1]".into());
        }
        let (lo, hi) = self.repeat_range;
        if !(0.0 <= lo && lo <= hi && hi < 1.0) {
            return bad(format!("repeat_range must satisfy 0 <= lo <= hi < 1, got {:?}", self.repeat_range));
        }
        if self.complex_threshold < 2 {
            return bad("complex_threshold must be at least 2".into());
        }
        if self.min_tweets < MIN_CASCADE_EVENTS {
            return bad(format!("min_tweets must be at least {MIN_CASCADE_EVENTS}"));
        }
        if !(self.simple_scale > 0.0 && self.simple_alpha > 0.0 && self.complex_mean >= 0.0) {
            return bad("popularity parameters must be positive".into());
        }
        if !(self.intra_rate_multiplier >= 0.0 && self.chatter_rate >= 0.0) {
            return bad("chatter rates must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedMeme {
    pub trace: MemeTrace,
    pub contagion: Contagion,
    /// Community of the first adopter.
    pub seed_community: usize,
}

#[derive(Debug, Clone)]
pub struct PlantedWorld {
    pub memes: Vec<PlantedMeme>,
    pub log: InteractionLog,
}

/// Generate planted memes plus an interaction log of meme retweets and
/// untagged background chatter.
pub fn gen_cascades(net: &SocialNetwork, part: &Partition, spec: &PlantedCascadeSpec) -> Result<PlantedWorld> {
    spec.validate()?;
    part.check_covers(net.n())?;
    if net.edge_count() == 0 {
        return Err(Error::Generation("planted cascades need a network with edges".into()));
    }
    let intra_seeds: Vec<NodeId> = (0..net.n())
        .filter(|&u| net.adj(u).iter().any(|&v| part.community_of(v) == part.community_of(u)))
        .collect();
    if intra_seeds.is_empty() {
        return Err(Error::Generation("no intra-community edge to seed complex memes".into()));
    }

    let mut memes = Vec::with_capacity(spec.n_memes);
    let mut interactions = Vec::new();
    for i in 0..spec.n_memes {
        let meme_id = format!("m{i:04}");
        let mut attempt = 0;
        let (meme, events) = loop {
            let mut stream = rng::substream(rng::derive_seed(spec.seed, attempt), i as u64);
            let contagion = if stream.random::<f64>() < spec.simple_fraction {
                Contagion::Simple
            } else {
                Contagion::Complex
            };
            let repeat = stream.random_range(spec.repeat_range.0..=spec.repeat_range.1);
            let mut sim = Spread::new(net, part, i as i64 * MEME_SPAN);
            match contagion {
                Contagion::Simple => {
                    let popularity = spec.min_tweets + simple_excess(spec, &mut stream);
                    sim.run_simple(popularity, repeat, spec.p, &mut stream);
                }
                Contagion::Complex => {
                    let home = sim.seed_complex(&intra_seeds, &mut stream);
                    let early = spec.min_tweets;
                    sim.run_complex(early, home, repeat, spec.complex_threshold, &mut stream);
                    let reached = sim.communities_reached();
                    let popularity = early + complex_excess(spec, reached, &mut stream);
                    sim.run_complex(popularity, home, repeat, spec.complex_threshold, &mut stream);
                }
            }
            if sim.users.len() >= MIN_CASCADE_EVENTS {
                let seed_community = part.community_of(sim.users[0]);
                let trace = sim.trace(&meme_id)?;
                let events = sim.interactions(&meme_id);
                break (
                    PlantedMeme {
                        trace,
                        contagion,
                        seed_community,
                    },
                    events,
                );
            }
            attempt += 1;
            if attempt >= MAX_REGENERATIONS {
                return Err(Error::Generation(format!("meme {meme_id} failed to reach {MIN_CASCADE_EVENTS} events")));
            }
        };
        memes.push(meme);
        interactions.extend(events);
    }

    let horizon = spec.n_memes as i64 * MEME_SPAN;
    interactions.extend(background_chatter(net, part, spec, horizon)?);
    Ok(PlantedWorld {
        memes,
        log: InteractionLog::new(interactions),
    })
}

fn simple_excess(spec: &PlantedCascadeSpec, rng: &mut Rng) -> usize {
    // P(X > x) = (x / scale)^-alpha for x >= scale
    let u: f64 = 1.0 - rng.random::<f64>();
    let x = spec.simple_scale * u.powf(-1.0 / spec.simple_alpha);
    (x.floor() as usize).min(spec.simple_cap)
}

fn complex_excess(spec: &PlantedCascadeSpec, communities: usize, rng: &mut Rng) -> usize {
    let mean = spec.complex_mean * communities as f64;
    if mean == 0.0 {
        return 0;
    }
    let geo = Geometric::new(1.0 / (mean + 1.0)).expect("valid geometric");
    (geo.sample(rng) as usize).min(spec.complex_cap)
}

/// State of one planted cascade.
struct Spread<'a> {
    net: &'a SocialNetwork,
    part: &'a Partition,
    t0: i64,
    users: Vec<NodeId>,
    /// (actor, target, event index) for meme-tagged retweets.
    links: Vec<(NodeId, NodeId, usize)>,
    infected: Vec<bool>,
    infector: Vec<Option<NodeId>>,
    adopters: Vec<NodeId>,
    spreaders: Vec<NodeId>,
    exposure: Vec<usize>,
}

impl<'a> Spread<'a> {
    fn new(net: &'a SocialNetwork, part: &'a Partition, t0: i64) -> Self {
        let n = net.n();
        Self {
            net,
            part,
            t0,
            users: Vec::new(),
            links: Vec::new(),
            infected: vec![false; n],
            infector: vec![None; n],
            adopters: Vec::new(),
            spreaders: Vec::new(),
            exposure: vec![0; n],
        }
    }

    fn emit(&mut self, v: NodeId, from: Option<NodeId>) {
        let idx = self.users.len();
        self.users.push(v);
        if let Some(u) = from {
            self.links.push((v, u, idx));
        }
        if !self.infected[v] {
            self.infected[v] = true;
            self.infector[v] = from;
            self.adopters.push(v);
            if !self.net.adj(v).is_empty() {
                self.spreaders.push(v);
            }
            for &w in self.net.adj(v) {
                self.exposure[w] += 1;
            }
        }
    }

    fn repeat_tweet(&mut self, rng: &mut Rng) {
        let w = self.adopters[rng.random_range(0..self.adopters.len())];
        let from = self.infector[w];
        self.emit(w, from);
    }

    fn run_simple(&mut self, popularity: usize, repeat: f64, p: f64, rng: &mut Rng) {
        let n = self.net.n();
        let start = rng.random_range(0..n);
        self.emit(start, None);
        while self.users.len() < popularity {
            if rng.random::<f64>() < repeat {
                self.repeat_tweet(rng);
            } else if rng.random::<f64>() < p && !self.spreaders.is_empty() {
                let u = self.spreaders[rng.random_range(0..self.spreaders.len())];
                let list = self.net.adj(u);
                let v = list[rng.random_range(0..list.len())];
                self.emit(v, Some(u));
            } else {
                let s = rng.random_range(0..n);
                self.emit(s, None);
            }
        }
    }

    /// Emit the two seed events on an intra-community edge; returns the
    /// home community.
    fn seed_complex(&mut self, seeds: &[NodeId], rng: &mut Rng) -> usize {
        let u = seeds[rng.random_range(0..seeds.len())];
        let home = self.part.community_of(u);
        let inside: Vec<NodeId> = self
            .net
            .adj(u)
            .iter()
            .copied()
            .filter(|&v| self.part.community_of(v) == home)
            .collect();
        let v = inside[rng.random_range(0..inside.len())];
        self.emit(u, None);
        self.emit(v, Some(u));
        home
    }

    fn communities_reached(&self) -> usize {
        let mut seen = vec![false; self.part.count()];
        for &u in &self.adopters {
            seen[self.part.community_of(u)] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    fn run_complex(&mut self, popularity: usize, home: usize, repeat: f64, threshold: usize, rng: &mut Rng) {
        while self.users.len() < popularity {
            if rng.random::<f64>() < repeat {
                self.repeat_tweet(rng);
                continue;
            }
            let mut spread = false;
            for _ in 0..MAX_SPREAD_ATTEMPTS {
                let u = self.spreaders[rng.random_range(0..self.spreaders.len())];
                let list = self.net.adj(u);
                let v = list[rng.random_range(0..list.len())];
                if self.part.community_of(v) == home || self.exposure[v] >= threshold {
                    self.emit(v, Some(u));
                    spread = true;
                    break;
                }
            }
            if !spread {
                self.repeat_tweet(rng);
            }
        }
    }

    fn trace(&self, meme_id: &str) -> Result<MemeTrace> {
        let events = self
            .users
            .iter()
            .enumerate()
            .map(|(i, &user)| TraceEvent {
                seq: i as u64,
                user,
                ts: self.t0 + i as i64,
            })
            .collect();
        MemeTrace::from_events(meme_id, events)
    }

    fn interactions(&self, meme_id: &str) -> Vec<InteractionEvent> {
        self.links
            .iter()
            .filter(|(a, t, _)| a != t)
            .map(|&(actor, target, idx)| InteractionEvent {
                actor,
                target,
                kind: InteractionKind::Retweet,
                ts: self.t0 + idx as i64,
                memes: vec![meme_id.to_string()],
            })
            .collect()
    }
}

/// Untagged interactions: Poisson counts per edge, `chatter_rate` on inter
/// edges and `chatter_rate * intra_rate_multiplier` on intra edges.
fn background_chatter(
    net: &SocialNetwork,
    part: &Partition,
    spec: &PlantedCascadeSpec,
    horizon: i64,
) -> Result<Vec<InteractionEvent>> {
    let mut rng = rng::substream(rng::derive_seed(spec.seed, u64::MAX), 0);
    let mut events = Vec::new();
    if spec.chatter_rate == 0.0 {
        return Ok(events);
    }
    let intra = Poisson::new(spec.chatter_rate * spec.intra_rate_multiplier.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let inter = Poisson::new(spec.chatter_rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    for (u, v) in net.edges() {
        let dist = if part.community_of(u) == part.community_of(v) { &intra } else { &inter };
        let k = dist.sample(&mut rng) as usize;
        for _ in 0..k {
            let (actor, target) = if rng.random::<bool>() { (u, v) } else { (v, u) };
            let kind = if rng.random::<bool>() {
                InteractionKind::Retweet
            } else {
                InteractionKind::Mention
            };
            events.push(InteractionEvent {
                actor,
                target,
                kind,
                ts: rng.random_range(0..horizon.max(1)),
                memes: Vec::new(),
            });
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::{gen_network, PlantedPartitionSpec};

    fn small_world() -> (SocialNetwork, Partition) {
        let w = gen_network(&PlantedPartitionSpec {
            n: 200,
            k: 4,
            p_in: 0.15,
            p_out: 0.005,
            seed: 2,
            ..Default::default()
        })
        .unwrap();
        (w.network, w.partition)
    }

    #[test]
    fn infinite_threshold_confines_complex_memes() {
        let (net, part) = small_world();
        let spec = PlantedCascadeSpec {
            n_memes: 20,
            simple_fraction: 0.0,
            complex_threshold: usize::MAX,
            seed: 4,
            ..Default::default()
        };
        let world = gen_cascades(&net, &part, &spec).unwrap();
        for m in &world.memes {
            assert!(m.trace.users().all(|u| part.community_of(u) == m.seed_community));
            let d = crate::metrics::usage_dominance(&m.trace, &part).unwrap();
            assert_eq!(d.value, 1.0);
        }
    }

    #[test]
    fn popularity_floor_and_ids() {
        let (net, part) = small_world();
        let spec = PlantedCascadeSpec {
            n_memes: 30,
            seed: 1,
            ..Default::default()
        };
        let world = gen_cascades(&net, &part, &spec).unwrap();
        assert_eq!(world.memes.len(), 30);
        assert!(world.memes.iter().all(|m| m.trace.len() >= spec.min_tweets));
        assert_eq!(world.memes[7].trace.meme_id, "m0007");
    }

    #[test]
    fn same_seed_same_world() {
        let (net, part) = small_world();
        let spec = PlantedCascadeSpec {
            n_memes: 15,
            seed: 9,
            ..Default::default()
        };
        let a = gen_cascades(&net, &part, &spec).unwrap();
        let b = gen_cascades(&net, &part, &spec).unwrap();
        assert_eq!(a.memes, b.memes);
        assert_eq!(a.log, b.log);
    }

    #[test]
    fn meme_retweets_follow_edges() {
        let (net, part) = small_world();
        let spec = PlantedCascadeSpec {
            n_memes: 10,
            chatter_rate: 0.0,
            seed: 5,
            ..Default::default()
        };
        let world = gen_cascades(&net, &part, &spec).unwrap();
        assert!(!world.log.is_empty());
        for e in world.log.events() {
            assert!(net.has_edge(e.actor, e.target));
            assert_eq!(e.memes.len(), 1);
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let (net, part) = small_world();
        let spec = PlantedCascadeSpec {
            n_memes: 5,
            ..Default::default()
        };
        assert!(gen_cascades(&net, &part, &spec).is_err());
    }
}
