use serde::{Deserialize, Serialize};

use super::InstanceError;
use crate::graph::Digraph;
use crate::solver::{Cost, PcspInstance, VertexRef};

/// A graph in JSON: `{"vertices": ["A", "B", …] | count, "edges": [["A", "B"], [0, 2], …]}`.
/// Edge endpoints are vertex names or indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vertices,
    pub edges: Vec<(VertexRef, VertexRef)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Vertices {
    Count(usize),
    Names(Vec<String>),
}

impl GraphFile {
    pub fn names(&self) -> Vec<String> {
        match &self.vertices {
            Vertices::Count(n) => (0..*n).map(|v| v.to_string()).collect(),
            Vertices::Names(names) => names.clone(),
        }
    }

    pub fn to_digraph(&self) -> Result<Digraph, InstanceError> {
        let names = self.names();
        let lookup = |r: &VertexRef| match r {
            VertexRef::Id(v) if *v < names.len() => Ok(*v),
            VertexRef::Name(s) => names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| InstanceError::BadGraph(format!("unknown vertex `{s}`"))),
            VertexRef::Id(v) => Err(InstanceError::BadGraph(format!("vertex index {v} out of range"))),
        };
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, InstanceError>>()?;
        Ok(Digraph::new(names.len(), edges))
    }
}

/// Colors `0..k`; an edge costs 1 when its endpoints share a color.
pub fn build_graph_coloring(graph: Digraph, k: usize) -> Result<PcspInstance, InstanceError> {
    Ok(PcspInstance::from_edge_fn(graph, k, |_, a, b| Cost::finite((a == b) as u64))?)
}
