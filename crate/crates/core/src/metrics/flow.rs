//! Communication volume on intra- and inter-community links.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::community::{CommunityId, Partition};
use crate::error::Result;
use crate::graph::{InteractionKind, InteractionLog, NodeId, SocialNetwork};
use crate::stats::{self, MannWhitney};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityFlow {
    pub community: CommunityId,
    pub intra_edges: usize,
    pub inter_edges: usize,
    /// Mean events per intra-community edge; missing without intra edges.
    pub w_intra: Option<f64>,
    /// Mean events per edge leaving the community; missing without such edges.
    pub w_inter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserFocus {
    pub user: NodeId,
    pub events: usize,
    pub f_intra: f64,
    pub f_inter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub events_used: usize,
    pub non_adjacent_events: usize,
    /// Mean weight over all intra-community edges.
    pub mean_w_intra: Option<f64>,
    /// Mean weight over all inter-community edges.
    pub mean_w_inter: Option<f64>,
    /// Edge-level weights, intra vs inter.
    pub weight_test: Option<MannWhitney>,
    /// Community-level means, intra vs inter.
    pub community_weight_test: Option<MannWhitney>,
    pub mean_f_intra: Option<f64>,
    pub mean_f_inter: Option<f64>,
    /// Per-user focus, intra vs inter.
    pub focus_test: Option<MannWhitney>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityFlowReport {
    pub communities: Vec<CommunityFlow>,
    pub users: Vec<UserFocus>,
    pub summary: FlowSummary,
}

/// Edge weights and user focus from an interaction log.
///
/// Weights count events per undirected edge, in either direction. Events
/// between users who are not linked in the network are counted in
/// `non_adjacent_events` and otherwise ignored. `kind` restricts the log to
/// retweets or mentions.
pub fn community_flow(
    log: &InteractionLog,
    net: &SocialNetwork,
    part: &Partition,
    kind: Option<InteractionKind>,
) -> Result<CommunityFlowReport> {
    part.check_covers(net.n())?;
    let mut weight: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut per_user: HashMap<NodeId, (usize, usize)> = HashMap::new();
    let mut used = 0;
    let mut non_adjacent = 0;
    for e in log.events() {
        if kind.is_some_and(|k| k != e.kind) {
            continue;
        }
        if e.actor >= net.n() || e.target >= net.n() || !net.has_edge(e.actor, e.target) {
            non_adjacent += 1;
            continue;
        }
        used += 1;
        *weight.entry((e.actor.min(e.target), e.actor.max(e.target))).or_insert(0) += 1;
        let same = part.community_of(e.actor) == part.community_of(e.target);
        let entry = per_user.entry(e.actor).or_insert((0, 0));
        if same {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }

    let c = part.count();
    let mut intra_sum = vec![0usize; c];
    let mut intra_n = vec![0usize; c];
    let mut inter_sum = vec![0usize; c];
    let mut inter_n = vec![0usize; c];
    let mut intra_weights = Vec::new();
    let mut inter_weights = Vec::new();
    for (u, v) in net.edges() {
        let w = weight.get(&(u, v)).copied().unwrap_or(0);
        let (cu, cv) = (part.community_of(u), part.community_of(v));
        if cu == cv {
            intra_sum[cu] += w;
            intra_n[cu] += 1;
            intra_weights.push(w as f64);
        } else {
            for cc in [cu, cv] {
                inter_sum[cc] += w;
                inter_n[cc] += 1;
            }
            inter_weights.push(w as f64);
        }
    }
    let avg = |s: usize, n: usize| (n > 0).then(|| s as f64 / n as f64);
    let communities: Vec<CommunityFlow> = (0..c)
        .map(|cc| CommunityFlow {
            community: cc,
            intra_edges: intra_n[cc],
            inter_edges: inter_n[cc],
            w_intra: avg(intra_sum[cc], intra_n[cc]),
            w_inter: avg(inter_sum[cc], inter_n[cc]),
        })
        .collect();

    let mut users: Vec<UserFocus> = per_user
        .into_iter()
        .map(|(user, (intra, inter))| {
            let events = intra + inter;
            let f_intra = intra as f64 / events as f64;
            UserFocus {
                user,
                events,
                f_intra,
                f_inter: 1.0 - f_intra,
            }
        })
        .collect();
    users.sort_by_key(|u| u.user);

    let comm_intra: Vec<f64> = communities.iter().filter_map(|c| c.w_intra).collect();
    let comm_inter: Vec<f64> = communities.iter().filter_map(|c| c.w_inter).collect();
    let f_intra: Vec<f64> = users.iter().map(|u| u.f_intra).collect();
    let f_inter: Vec<f64> = users.iter().map(|u| u.f_inter).collect();
    let summary = FlowSummary {
        events_used: used,
        non_adjacent_events: non_adjacent,
        mean_w_intra: stats::mean(&intra_weights),
        mean_w_inter: stats::mean(&inter_weights),
        weight_test: stats::mann_whitney(&intra_weights, &inter_weights),
        community_weight_test: stats::mann_whitney(&comm_intra, &comm_inter),
        mean_f_intra: stats::mean(&f_intra),
        mean_f_inter: stats::mean(&f_inter),
        focus_test: stats::mann_whitney(&f_intra, &f_inter),
    };
    Ok(CommunityFlowReport {
        communities,
        users,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::InteractionEvent;

    fn ev(actor: NodeId, target: NodeId, kind: InteractionKind) -> InteractionEvent {
        InteractionEvent {
            actor,
            target,
            kind,
            ts: 0,
            memes: vec![],
        }
    }

    fn setup() -> (SocialNetwork, Partition) {
        // communities {0,1,2} and {3,4}; 2-3 crosses
        let net = SocialNetwork::from_edges(5, &[(0, 1), (1, 2), (0, 2), (3, 4), (2, 3)]).unwrap();
        let part = Partition::from_labels(&[0, 0, 0, 1, 1]).unwrap();
        (net, part)
    }

    #[test]
    fn intra_only_log() {
        let (net, part) = setup();
        let log = InteractionLog::new(vec![
            ev(0, 1, InteractionKind::Retweet),
            ev(1, 2, InteractionKind::Retweet),
            ev(4, 3, InteractionKind::Mention),
        ]);
        let rep = community_flow(&log, &net, &part, None).unwrap();
        assert!(rep.users.iter().all(|u| u.f_intra == 1.0 && u.f_inter == 0.0));
    }

    #[test]
    fn edge_weight_counts_both_directions() {
        let (net, part) = setup();
        let log = InteractionLog::new(vec![
            ev(0, 1, InteractionKind::Retweet),
            ev(1, 0, InteractionKind::Retweet),
            ev(0, 1, InteractionKind::Mention),
            ev(0, 4, InteractionKind::Mention),
        ]);
        let rep = community_flow(&log, &net, &part, None).unwrap();
        // community 0 has 3 intra edges carrying 3 events in total
        assert_eq!(rep.communities[0].w_intra, Some(1.0));
        assert_eq!(rep.summary.events_used, 3);
        assert_eq!(rep.summary.non_adjacent_events, 1);
        let only_rt = community_flow(&log, &net, &part, Some(InteractionKind::Retweet)).unwrap();
        assert_eq!(only_rt.summary.events_used, 2);
    }

    #[test]
    fn missing_inter_is_not_zero() {
        let net = SocialNetwork::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let part = Partition::from_labels(&[0, 0, 1, 1]).unwrap();
        let rep = community_flow(&InteractionLog::default(), &net, &part, None).unwrap();
        assert_eq!(rep.communities[0].w_inter, None);
        assert_eq!(rep.communities[0].w_intra, Some(0.0));
    }

    #[test]
    fn focus_sums_to_one() {
        let (net, part) = setup();
        let log = InteractionLog::new(vec![
            ev(2, 1, InteractionKind::Retweet),
            ev(2, 3, InteractionKind::Retweet),
            ev(2, 3, InteractionKind::Retweet),
        ]);
        let rep = community_flow(&log, &net, &part, None).unwrap();
        let u = &rep.users[0];
        assert_eq!(u.user, 2);
        assert!((u.f_intra - 1.0 / 3.0).abs() < 1e-12);
        assert!((u.f_intra + u.f_inter - 1.0).abs() < 1e-15);
    }
}
