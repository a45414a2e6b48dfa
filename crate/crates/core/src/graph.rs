//! Plain directed graph topology shared by instances and the oracle.

use std::collections::BTreeSet;

use serde::Serialize;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Vertices `0..vertex_count` and an ordered edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Digraph {
    pub vertex_count: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Digraph {
    pub fn new(vertex_count: usize, edges: Vec<(VertexId, VertexId)>) -> Self {
        Digraph { vertex_count, edges }
    }

    pub fn edge_index(&self, src: VertexId, dst: VertexId) -> Option<EdgeId> {
        self.edges.iter().position(|&e| e == (src, dst))
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    /// Whether `set` induces a weakly connected subgraph. The empty set counts
    /// as connected.
    pub fn is_weakly_connected(&self, set: &BTreeSet<VertexId>) -> bool {
        let Some(&first) = set.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([first]);
        let mut frontier = vec![first];
        while let Some(v) = frontier.pop() {
            for &(a, b) in &self.edges {
                let next = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if set.contains(&next) && seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
        seen.len() == set.len()
    }
}
