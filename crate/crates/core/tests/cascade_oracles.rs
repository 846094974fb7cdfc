//! Statistical oracles for the cascade models and subsampling.

use std::collections::HashMap;

use memecomm::cascade::{simulate, simulate_m2_from, simulate_m4_from, subsample, CascadeParams, M1Mode, MemeTrace, Model};
use memecomm::community::Partition;
use memecomm::graph::SocialNetwork;
use memecomm::rng::derive_seed;

fn params(target: usize, p: f64, seed: u64) -> CascadeParams {
    CascadeParams {
        p,
        target_tweets: target,
        oversample_factor: 1,
        sample_rate: 1.0,
        seed,
    }
}

fn three_sigma(observed: f64, expected: f64, sigma: f64) -> bool {
    (observed - expected).abs() <= 3.0 * sigma
}

/// Exhaustive enumeration of the p = 1 walk on a triangle: probability of
/// each distinct-adopter count after `events` events.
fn triangle_adopter_distribution(events: usize) -> HashMap<usize, f64> {
    fn go(infected: &mut Vec<usize>, left: usize, prob: f64, out: &mut HashMap<usize, f64>) {
        if left == 0 {
            *out.entry(infected.len()).or_default() += prob;
            return;
        }
        let k = infected.len() as f64;
        for &u in infected.clone().iter() {
            for v in (0..3).filter(|&v| v != u) {
                let fresh = !infected.contains(&v);
                if fresh {
                    infected.push(v);
                }
                go(infected, left - 1, prob / k / 2.0, out);
                if fresh {
                    infected.pop();
                }
            }
        }
    }
    let mut out = HashMap::new();
    // the start is symmetric; fix it at node 0
    go(&mut vec![0], events - 1, 1.0, &mut out);
    out
}

#[test]
fn triangle_walk_matches_enumeration() {
    let net = SocialNetwork::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let oracle = triangle_adopter_distribution(3);
    assert!((oracle.values().sum::<f64>() - 1.0).abs() < 1e-12);
    let runs = 20_000;
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for i in 0..runs {
        let t = simulate(&net, None, Model::M2, &params(3, 1.0, derive_seed(17, i))).unwrap();
        assert_eq!(t.len(), 3);
        *counts.entry(t.adopters().len()).or_default() += 1;
    }
    for (&k, &p) in &oracle {
        let observed = *counts.get(&k).unwrap_or(&0) as f64 / runs as f64;
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        assert!(three_sigma(observed, p, sigma), "adopters={k}: {observed} vs {p}");
    }
    assert!(counts.keys().all(|k| oracle.contains_key(k)));
}

#[test]
fn star_leaves_are_hit_uniformly() {
    let leaves = 10;
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    let net = SocialNetwork::from_edges(leaves + 1, &edges).unwrap();
    let t = simulate_m2_from(&net, &params(20_000, 1.0, 5), 0).unwrap();
    let mut hits = vec![0usize; leaves + 1];
    for u in t.users() {
        hits[u] += 1;
    }
    let leaf_events: usize = hits[1..].iter().sum();
    let q = 1.0 / leaves as f64;
    let expected = leaf_events as f64 * q;
    let sigma = (leaf_events as f64 * q * (1.0 - q)).sqrt();
    for (leaf, &h) in hits.iter().enumerate().skip(1) {
        assert!(three_sigma(h as f64, expected, sigma), "leaf {leaf}: {h} vs {expected}");
    }
}

#[test]
fn m1_users_mode_binomial_per_community() {
    let n = 10_000;
    let net = SocialNetwork::from_edges(n, &[]).unwrap();
    let labels: Vec<usize> = (0..n).map(|u| u / 1000).collect();
    let part = Partition::from_labels(&labels).unwrap();
    let runs = 1000;
    let mut per_community = vec![0usize; 10];
    for i in 0..runs {
        let t = simulate(&net, None, Model::M1(M1Mode::Users), &params(50, 0.85, derive_seed(3, i))).unwrap();
        assert_eq!(t.adopters().len(), 50);
        for (c, k) in t.community_adopter_counts(&part).unwrap().into_iter().enumerate() {
            per_community[c] += k;
        }
    }
    let sigma = (50.0 * 0.1 * 0.9 / runs as f64).sqrt();
    for (c, &total) in per_community.iter().enumerate() {
        let mean = total as f64 / runs as f64;
        assert!(three_sigma(mean, 5.0, sigma), "community {c}: {mean}");
    }
}

#[test]
fn m1_tweets_mode_samples_with_replacement() {
    let net = SocialNetwork::from_edges(5, &[]).unwrap();
    let t = simulate(&net, None, Model::M1(M1Mode::Tweets), &params(200, 0.85, 1)).unwrap();
    assert_eq!(t.len(), 200);
    assert!(t.adopters().len() <= 5);
    let too_many = simulate(&net, None, Model::M1(M1Mode::Users), &params(6, 0.85, 1));
    assert!(too_many.is_err());
}

#[test]
fn subsample_inclusion_is_uniform() {
    let trace = MemeTrace::from_users("m", 0..20);
    let reps = 10_000u64;
    let mut included = [0usize; 20];
    for i in 0..reps {
        let s = subsample(&trace, 0.1, derive_seed(99, i)).unwrap();
        assert_eq!(s.len(), 2);
        for e in s.events() {
            included[e.ts as usize] += 1;
        }
    }
    let sigma = (0.1 * 0.9 / reps as f64).sqrt();
    for (idx, &k) in included.iter().enumerate() {
        let freq = k as f64 / reps as f64;
        assert!(three_sigma(freq, 0.1, sigma), "event {idx}: {freq}");
    }
}

fn two_cliques() -> (SocialNetwork, Partition) {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for u in base..base + 5 {
            for v in u + 1..base + 5 {
                edges.push((u, v));
            }
        }
    }
    edges.push((4, 5));
    let net = SocialNetwork::from_edges(10, &edges).unwrap();
    let part = Partition::from_labels(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
    (net, part)
}

#[test]
fn m4_never_crosses_without_restarts() {
    let (net, part) = two_cliques();
    for seed in 0..50 {
        let t = simulate_m4_from(&net, &part, &params(200, 1.0, seed), 4).unwrap();
        assert!(t.users().all(|u| u < 5), "seed {seed}");
    }
}

#[test]
fn m2_crosses_the_bridge() {
    let (net, _) = two_cliques();
    let crossed = (0..50)
        .filter(|&seed| simulate_m2_from(&net, &params(200, 1.0, seed), 4).unwrap().users().any(|u| u >= 5))
        .count();
    assert!(crossed > 40);
}
