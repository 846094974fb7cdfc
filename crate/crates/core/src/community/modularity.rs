use super::Partition;
use crate::error::{Error, Result};
use crate::graph::SocialNetwork;

/// Newman-Girvan modularity `Q = sum_c [m_c/m - (d_c/2m)^2]`.
pub fn modularity(net: &SocialNetwork, part: &Partition) -> Result<f64> {
    modularity_with_resolution(net, part, 1.0)
}

pub fn modularity_with_resolution(net: &SocialNetwork, part: &Partition, resolution: f64) -> Result<f64> {
    part.check_covers(net.n())?;
    let m = net.edge_count();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let c = part.count();
    let mut internal = vec![0usize; c];
    let mut degree = vec![0usize; c];
    for u in 0..net.n() {
        degree[part.community_of(u)] += net.degree(u);
    }
    for (u, v) in net.edges() {
        let cu = part.community_of(u);
        if cu == part.community_of(v) {
            internal[cu] += 1;
        }
    }
    let m = m as f64;
    let q = internal
        .iter()
        .zip(&degree)
        .map(|(&mc, &dc)| {
            let share = dc as f64 / (2.0 * m);
            mc as f64 / m - resolution * share * share
        })
        .sum();
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_triangles() {
        let net = SocialNetwork::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let part = Partition::from_labels(&[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((modularity(&net, &part).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_community_is_zero() {
        let net = SocialNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let part = Partition::single_community(4).unwrap();
        assert_eq!(modularity(&net, &part).unwrap(), 0.0);
    }

    #[test]
    fn triangle_singletons() {
        let net = SocialNetwork::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let part = Partition::singletons(3).unwrap();
        assert!((modularity(&net, &part).unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_is_undefined() {
        let net = SocialNetwork::from_edges(3, &[]).unwrap();
        let part = Partition::singletons(3).unwrap();
        assert!(matches!(modularity(&net, &part), Err(Error::NoEdges)));
    }
}
