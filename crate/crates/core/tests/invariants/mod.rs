//! Invariant suites over randomly generated partitions, traces and graphs,
//! shared by the property tests and the acceptance run. Each function runs
//! its property on `CASES` generated inputs and panics on a counterexample.

use memecomm::cascade::{simulate_with_rng, CascadeParams, MemeTrace, Model};
use memecomm::community::Partition;
use memecomm::graph::{InteractionEvent, InteractionKind, InteractionLog, SocialNetwork};
use memecomm::metrics::{adoption_dominance, adoption_entropy, raw_metrics, usage_dominance, usage_entropy};
use memecomm::predictor::extract_features;
use memecomm::rng;
use proptest::prelude::*;

pub const CASES: u32 = 1000;

/// (community labels, trace users) over `n` nodes.
fn labelled_trace() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..40).prop_flat_map(|n| (prop::collection::vec(0usize..6, n), prop::collection::vec(0..n, 1..80)))
}

fn graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..max_n).prop_flat_map(|n| {
        let pairs = prop::collection::vec((0..n, 0..n), 1..(3 * n))
            .prop_map(|es| es.into_iter().filter(|(u, v)| u != v).collect::<Vec<_>>())
            .prop_filter("needs an edge", |es: &Vec<(usize, usize)>| !es.is_empty());
        (Just(n), pairs)
    })
}

fn touched(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c > 0).count()
}

pub fn entropy_and_dominance_bounds() {
    proptest!(ProptestConfig::with_cases(CASES), |((labels, users) in labelled_trace())| {
        let part = Partition::from_labels(&labels).unwrap();
        let trace = MemeTrace::from_users("m", users);
        let ct = touched(&trace.community_tweet_counts(&part).unwrap()) as f64;
        let cu = touched(&trace.community_adopter_counts(&part).unwrap()) as f64;
        let (r, g) = (usage_dominance(&trace, &part).unwrap().value, adoption_dominance(&trace, &part).unwrap().value);
        let (ht, hu) = (usage_entropy(&trace, &part).unwrap(), adoption_entropy(&trace, &part).unwrap());
        prop_assert!(ht >= 0.0 && ht <= ct.ln() + 1e-12);
        prop_assert!(hu >= 0.0 && hu <= cu.ln() + 1e-12);
        prop_assert!(r >= 1.0 / ct - 1e-12 && r <= 1.0);
        prop_assert!(g >= 1.0 / cu - 1e-12 && g <= 1.0);
    });
}

pub fn dominance_one_iff_entropy_zero() {
    proptest!(ProptestConfig::with_cases(CASES), |((labels, users) in labelled_trace())| {
        let part = Partition::from_labels(&labels).unwrap();
        let trace = MemeTrace::from_users("m", users);
        let r = usage_dominance(&trace, &part).unwrap().value;
        let g = adoption_dominance(&trace, &part).unwrap().value;
        let ht = usage_entropy(&trace, &part).unwrap();
        let hu = adoption_entropy(&trace, &part).unwrap();
        prop_assert_eq!(r == 1.0, ht == 0.0);
        prop_assert_eq!(g == 1.0, hu == 0.0);
    });
}

pub fn metrics_are_permutation_equivariant() {
    proptest!(ProptestConfig::with_cases(CASES), |((n, edges) in graph(30), label_seed in any::<u64>(), trace_len in 1usize..60, perm_seed in any::<u64>())| {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut r = rng::stream(label_seed);
        let labels: Vec<usize> = (0..n).map(|_| r.random_range(0..4)).collect();
        let users: Vec<usize> = (0..trace_len).map(|_| r.random_range(0..n)).collect();
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(&mut rng::stream(perm_seed));

        let net = SocialNetwork::from_edges(n, &edges).unwrap();
        let part = Partition::from_labels(&labels).unwrap();
        let trace = MemeTrace::from_users("m", users.iter().copied());

        let p_edges: Vec<_> = edges.iter().map(|&(u, v)| (pi[u], pi[v])).collect();
        let mut p_labels = vec![0; n];
        for u in 0..n {
            // community ids are also relabelled
            p_labels[pi[u]] = 3 - labels[u];
        }
        let p_net = SocialNetwork::from_edges(n, &p_edges).unwrap();
        let p_part = Partition::from_labels(&p_labels).unwrap();
        let p_trace = MemeTrace::from_users("m", users.iter().map(|&u| pi[u]));

        let a = raw_metrics(&trace, &net, &part).unwrap();
        let b = raw_metrics(&p_trace, &p_net, &p_part).unwrap();
        prop_assert_eq!((a.t, a.u, a.communities_touched), (b.t, b.u, b.communities_touched));
        for (x, y) in [(a.r, b.r), (a.g, b.g), (a.ht, b.ht), (a.hu, b.hu), (a.nt, b.nt), (a.nu, b.nu)] {
            prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
        }
        prop_assert_eq!(a.usage_tie, b.usage_tie);
    });
}

pub fn m4_equals_m2_on_one_community() {
    proptest!(ProptestConfig::with_cases(CASES), |((n, edges) in graph(40), seed in any::<u64>(), p in 0.0f64..=1.0, target in 1usize..60)| {
        let net = SocialNetwork::from_edges(n, &edges).unwrap();
        let part = Partition::single_community(n).unwrap();
        let params = CascadeParams { p, target_tweets: target, oversample_factor: 2, sample_rate: 0.1, seed };
        let m2 = simulate_with_rng(&net, None, Model::M2, &params, &mut rng::substream(seed, 0)).unwrap();
        let m4 = simulate_with_rng(&net, Some(&part), Model::M4, &params, &mut rng::substream(seed, 0)).unwrap();
        prop_assert_eq!(m2.events(), m4.events());
    });
}

pub fn features_ignore_everything_after_the_early_window() {
    proptest!(ProptestConfig::with_cases(CASES), |((n, edges) in graph(30), seed in any::<u64>(), late_len in 0usize..60, n_interactions in 0usize..80)| {
        use rand::Rng;
        let mut r = rng::stream(seed);
        let net = SocialNetwork::from_edges(n, &edges).unwrap();
        let labels: Vec<usize> = (0..n).map(|_| r.random_range(0..4)).collect();
        let part = Partition::from_labels(&labels).unwrap();
        let early: Vec<usize> = (0..50).map(|_| r.random_range(0..n)).collect();
        let late: Vec<usize> = (0..late_len).map(|_| r.random_range(0..n)).collect();
        let interactions: Vec<InteractionEvent> = (0..n_interactions)
            .map(|_| InteractionEvent {
                actor: r.random_range(0..n),
                target: r.random_range(0..n),
                kind: InteractionKind::Retweet,
                ts: r.random_range(0..120),
                memes: if r.random::<bool>() { vec!["m".to_string()] } else { vec![] },
            })
            .collect();
        let full_trace = MemeTrace::from_users("m", early.iter().chain(&late).copied());
        let full_log = InteractionLog::new(interactions.clone());
        let early_trace = MemeTrace::from_users("m", early.iter().copied());
        // trace timestamps equal event indices, so the window ends at ts 49
        let early_log = InteractionLog::new(interactions.into_iter().filter(|e| e.ts <= 49));
        let a = extract_features(&full_trace, &net, &part, &full_log, 50).unwrap();
        let b = extract_features(&early_trace, &net, &part, &early_log, 50).unwrap();
        prop_assert_eq!(a, b);
    });
}

/// Every suite with its name, for runners that report per suite.
#[allow(dead_code)]
pub const SUITES: [(&str, fn()); 5] = [
    ("entropy/dominance bounds", entropy_and_dominance_bounds),
    ("dominance = 1 iff entropy = 0", dominance_one_iff_entropy_zero),
    ("permutation equivariance", metrics_are_permutation_equivariant),
    ("M4 = M2 on one community", m4_equals_m2_on_one_community),
    ("features ignore post-window events", features_ignore_everything_after_the_early_window),
];
