use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::graph::{IdMap, NodeId};

pub type CommunityId = usize;

/// Node to community assignment with dense ids `0..C`.
///
/// Ids are canonical: communities are numbered in order of their lowest
/// member, so two assignments that induce the same grouping compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<CommunityId>,
    count: usize,
}

impl Partition {
    /// Canonicalize arbitrary labels into a partition.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("partition over zero nodes".into()));
        }
        let mut remap: HashMap<L, CommunityId> = HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = remap.len();
                *remap.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Self {
            assignment,
            count: remap.len(),
        })
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn single_community(n: usize) -> Result<Self> {
        Self::from_labels(&vec![0usize; n])
    }

    /// Number of nodes covered.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of communities.
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn community_of(&self, u: NodeId) -> CommunityId {
        self.assignment[u]
    }

    pub fn get(&self, u: NodeId) -> Result<CommunityId> {
        self.assignment
            .get(u)
            .copied()
            .ok_or(Error::PartitionMissingNode(u))
    }

    pub fn assignment(&self) -> &[CommunityId] {
        &self.assignment
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut members = vec![Vec::new(); self.count];
        for (u, &c) in self.assignment.iter().enumerate() {
            members[c].push(u);
        }
        members
    }

    /// Error unless the partition covers exactly `n` nodes.
    pub fn check_covers(&self, n: usize) -> Result<()> {
        if self.assignment.len() < n {
            return Err(Error::PartitionMissingNode(self.assignment.len()));
        }
        if self.assignment.len() > n {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} nodes, network has {n}",
                self.assignment.len()
            )));
        }
        Ok(())
    }
}

/// Write `node_id,community_id` CSV with external node ids.
pub fn write_partition<W: Write>(part: &Partition, ids: &IdMap, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "community_id"]).map_err(csv_err)?;
    for (u, &c) in part.assignment().iter().enumerate() {
        w.write_record([ids.label(u), &c.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a partition CSV. Every node in `ids` must be assigned.
pub fn read_partition<R: Read>(input: R, ids: &IdMap) -> Result<Partition> {
    let mut r = csv::Reader::from_reader(input);
    let mut labels: Vec<Option<u64>> = vec![None; ids.len()];
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 fields, got {}", rec.len()),
            });
        }
        let node = ids.resolve(&rec[0])?;
        let community: u64 = rec[1].trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad community id {:?}", &rec[1]),
        })?;
        labels[node] = Some(community);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(u, l)| l.ok_or(Error::PartitionMissingNode(u)))
        .collect::<Result<Vec<_>>>()?;
    Partition::from_labels(&labels)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ids() {
        let a = Partition::from_labels(&[7, 7, 3, 9, 3]).unwrap();
        assert_eq!(a.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(a.count(), 3);
        assert_eq!(a.sizes(), vec![2, 2, 1]);
        let b = Partition::from_labels(&[1, 1, 0, 5, 0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let ids = IdMap::sequential(4);
        let p = Partition::from_labels(&[0, 1, 0, 2]).unwrap();
        let mut buf = Vec::new();
        write_partition(&p, &ids, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("node_id,community_id\n"));
        let back = read_partition(buf.as_slice(), &ids).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn missing_node_is_an_error() {
        let ids = IdMap::sequential(3);
        let text = "node_id,community_id\n0,0\n2,1\n";
        assert!(matches!(
            read_partition(text.as_bytes(), &ids),
            Err(Error::PartitionMissingNode(1))
        ));
    }

    #[test]
    fn empty_partition_rejected() {
        assert!(Partition::from_labels::<usize>(&[]).is_err());
    }
}
