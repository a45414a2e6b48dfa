//! The instance file format.
//!
//! ```json
//! {
//!   "domain": 2,
//!   "edge_costs": {"model": "mismatch", "weight": 1},
//!   "vertex_costs": [{"v": 3, "costs": [0, "inf"]}],
//!   "allowed": {"entry": [0], "exit": [1]}
//! }
//! ```
//!
//! `edge_costs` is either a named model (`zero`, `mismatch`: `weight` when the
//! endpoint values differ, `match`: `weight` when they agree) or a list of
//! `{"src", "dst", "table"}` entries with a `d × d` table indexed by source then
//! target value; edges not listed cost nothing. Vertices are canonical ids,
//! given as numbers or strings, or one of `entry`, `exit`, `break`, `continue`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Cost, PcspInstance, SolveError};
use crate::graph::{Digraph, VertexId};
use crate::spl::Specials;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Id(VertexId),
    Name(String),
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRef::Id(v) => write!(f, "{v}"),
            VertexRef::Name(s) => f.write_str(s),
        }
    }
}

impl VertexRef {
    /// Resolves against a graph with `vertex_count` vertices and, when known,
    /// its special vertices.
    pub fn resolve(&self, vertex_count: usize, specials: Option<&Specials>) -> Result<VertexId, SolveError> {
        let unknown = || SolveError::UnknownVertex(self.to_string());
        let v = match self {
            VertexRef::Id(v) => *v,
            VertexRef::Name(name) => match (name.as_str(), specials) {
                ("entry", Some(sp)) => sp.0[0],
                ("exit", Some(sp)) => sp.0[1],
                ("break", Some(sp)) => sp.0[2],
                ("continue", Some(sp)) => sp.0[3],
                (other, _) => other.trim().parse().map_err(|_| unknown())?,
            },
        };
        if v < vertex_count {
            Ok(v)
        } else {
            Err(unknown())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeCosts {
    Model {
        model: String,
        #[serde(default = "one")]
        weight: Cost,
    },
    Explicit(Vec<EdgeTableSpec>),
}

fn one() -> Cost {
    Cost::finite(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTableSpec {
    pub src: VertexRef,
    pub dst: VertexRef,
    pub table: Vec<Vec<Cost>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCostSpec {
    pub v: VertexRef,
    pub costs: Vec<Cost>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub domain: usize,
    pub edge_costs: EdgeCosts,
    #[serde(default)]
    pub vertex_costs: Vec<VertexCostSpec>,
    #[serde(default)]
    pub allowed: BTreeMap<String, Vec<usize>>,
}

impl InstanceFile {
    /// Builds the instance over `graph`. `specials` enables the role names.
    pub fn to_instance(&self, graph: Digraph, specials: Option<&Specials>) -> Result<PcspInstance, SolveError> {
        let n = graph.vertex_count;
        let d = self.domain;
        let mut inst = match &self.edge_costs {
            EdgeCosts::Model { model, weight } => {
                let w = *weight;
                match model.as_str() {
                    "zero" => PcspInstance::new(graph, d)?,
                    "mismatch" => PcspInstance::from_edge_fn(graph, d, |_, a, b| if a != b { w } else { Cost::ZERO })?,
                    "match" => PcspInstance::from_edge_fn(graph, d, |_, a, b| if a == b { w } else { Cost::ZERO })?,
                    other => return Err(SolveError::UnknownModel(other.to_string())),
                }
            }
            EdgeCosts::Explicit(tables) => {
                let mut inst = PcspInstance::new(graph, d)?;
                for spec in tables {
                    let (s, t) = (spec.src.resolve(n, specials)?, spec.dst.resolve(n, specials)?);
                    let e = inst.graph().edge_index(s, t).ok_or(SolveError::UnknownEdge(s, t))?;
                    let got = spec.table.iter().map(Vec::len).sum::<usize>();
                    if spec.table.len() != d || spec.table.iter().any(|row| row.len() != d) {
                        return Err(SolveError::BadTable { expected: d * d, got });
                    }
                    let flat: Vec<Cost> = spec.table.iter().flatten().copied().collect();
                    inst.set_edge_table(e, &flat)?;
                }
                inst
            }
        };
        for spec in &self.vertex_costs {
            let v = spec.v.resolve(n, specials)?;
            if spec.costs.len() != d {
                return Err(SolveError::BadTable { expected: d, got: spec.costs.len() });
            }
            for (b, &c) in spec.costs.iter().enumerate() {
                inst.set_vertex_cost(v, b, c)?;
            }
        }
        for (key, values) in &self.allowed {
            let v = VertexRef::Name(key.clone()).resolve(n, specials)?;
            inst.set_allowed(v, values)?;
        }
        Ok(inst)
    }
}
