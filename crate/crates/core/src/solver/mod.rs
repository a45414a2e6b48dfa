//! Partial constraint satisfaction over control-flow graphs.
//!
//! An instance assigns every vertex a value from the domain `{0, …, d−1}`. Each
//! edge has a `d × d` cost table indexed by the values of its endpoints, each
//! vertex has a cost per value, and each vertex may be restricted to a subset
//! of the domain. The objective is the total cost of an assignment; [`solve`]
//! minimizes it by dynamic programming over an SPL decomposition, and
//! [`oracle_solve`] does the same by exhaustive search for cross-checking.

mod cost;
mod dp;
mod json;
mod oracle;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Digraph, EdgeId, VertexId};

pub use cost::Cost;
pub use dp::{dp_tables, solve, DpTable};
pub use json::{EdgeCosts, EdgeTableSpec, InstanceFile, VertexCostSpec, VertexRef};
pub use oracle::{oracle_solve, oracle_solve_with_budget, DEFAULT_ORACLE_BUDGET};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("instance graph does not match the decomposition's control-flow graph")]
    InstanceMismatch,
    #[error("assignment has no value for vertex {0}")]
    PartialAssignment(VertexId),
    #[error("value {value} at vertex {vertex} is outside the domain of size {domain}")]
    ValueOutOfDomain { vertex: VertexId, value: usize, domain: usize },
    #[error("exhaustive search needs {required} combinations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("domain must contain at least one value")]
    EmptyDomain,
    #[error("vertex {0} has an empty allowed set")]
    EmptyAllowedSet(VertexId),
    #[error("no vertex {0}")]
    UnknownVertex(String),
    #[error("no edge {0}→{1}")]
    UnknownEdge(VertexId, VertexId),
    #[error("cost table has {got} entries, expected {expected}")]
    BadTable { expected: usize, got: usize },
    #[error("unknown edge cost model `{0}`")]
    UnknownModel(String),
}

/// A total map from vertices to domain values, indexed by vertex id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn get(&self, v: VertexId) -> usize {
        self.0[v]
    }

    /// Builds an assignment from a partial map; every vertex in `0..vertex_count`
    /// must be present.
    pub fn from_pairs(
        vertex_count: usize,
        pairs: impl IntoIterator<Item = (VertexId, usize)>,
    ) -> Result<Assignment, SolveError> {
        let mut values = vec![None; vertex_count];
        for (v, value) in pairs {
            *values.get_mut(v).ok_or_else(|| SolveError::UnknownVertex(v.to_string()))? = Some(value);
        }
        values
            .into_iter()
            .enumerate()
            .map(|(v, value)| value.ok_or(SolveError::PartialAssignment(v)))
            .collect::<Result<_, _>>()
            .map(Assignment)
    }
}

/// The optimum and one assignment attaining it. The assignment is absent when
/// every assignment has infinite cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub min_cost: Cost,
    pub assignment: Option<Assignment>,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        self.min_cost.is_finite()
    }

    /// `{"min_cost": n | "inf", "assignment": {"<vertex>": value, …} | null}`
    /// with vertices in ascending order.
    pub fn to_json(&self) -> serde_json::Value {
        let assignment = match &self.assignment {
            Some(a) => serde_json::Value::Object(
                a.0.iter().enumerate().map(|(v, &b)| (v.to_string(), b.into())).collect(),
            ),
            None => serde_json::Value::Null,
        };
        serde_json::json!({ "min_cost": self.min_cost, "assignment": assignment })
    }
}

/// A cost-minimization problem over a directed graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcspInstance {
    graph: Digraph,
    domain: usize,
    /// `|E| × d × d`, row-major by (edge, source value, target value).
    edge_costs: Vec<Cost>,
    /// `|V| × d`.
    vertex_costs: Vec<Cost>,
    /// `|V| × d`.
    allowed: Vec<bool>,
}

impl PcspInstance {
    /// All costs zero, every value allowed everywhere.
    pub fn new(graph: Digraph, domain: usize) -> Result<PcspInstance, SolveError> {
        if domain == 0 {
            return Err(SolveError::EmptyDomain);
        }
        let (n, m) = (graph.vertex_count, graph.edges.len());
        Ok(PcspInstance {
            graph,
            domain,
            edge_costs: vec![Cost::ZERO; m * domain * domain],
            vertex_costs: vec![Cost::ZERO; n * domain],
            allowed: vec![true; n * domain],
        })
    }

    /// Instance whose edge costs are given by `cost(edge, source value, target value)`.
    pub fn from_edge_fn(
        graph: Digraph,
        domain: usize,
        cost: impl Fn(EdgeId, usize, usize) -> Cost,
    ) -> Result<PcspInstance, SolveError> {
        let mut inst = PcspInstance::new(graph, domain)?;
        for e in 0..inst.edge_count() {
            for b0 in 0..domain {
                for b1 in 0..domain {
                    inst.edge_costs[(e * domain + b0) * domain + b1] = cost(e, b0, b1);
                }
            }
        }
        Ok(inst)
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    #[inline]
    pub fn edge_cost(&self, edge: EdgeId, b0: usize, b1: usize) -> Cost {
        self.edge_costs[(edge * self.domain + b0) * self.domain + b1]
    }

    #[inline]
    pub fn vertex_cost(&self, v: VertexId, b: usize) -> Cost {
        self.vertex_costs[v * self.domain + b]
    }

    #[inline]
    pub fn is_allowed(&self, v: VertexId, b: usize) -> bool {
        self.allowed[v * self.domain + b]
    }

    pub fn allowed_values(&self, v: VertexId) -> Vec<usize> {
        (0..self.domain).filter(|&b| self.is_allowed(v, b)).collect()
    }

    fn check_value(&self, v: VertexId, b: usize) -> Result<(), SolveError> {
        if v >= self.vertex_count() {
            return Err(SolveError::UnknownVertex(v.to_string()));
        }
        if b >= self.domain {
            return Err(SolveError::ValueOutOfDomain { vertex: v, value: b, domain: self.domain });
        }
        Ok(())
    }

    pub fn set_edge_cost(&mut self, edge: EdgeId, b0: usize, b1: usize, cost: Cost) {
        let d = self.domain;
        assert!(b0 < d && b1 < d, "value outside the domain");
        self.edge_costs[(edge * d + b0) * d + b1] = cost;
    }

    /// Replaces an edge's whole table, given row-major by source value.
    pub fn set_edge_table(&mut self, edge: EdgeId, table: &[Cost]) -> Result<(), SolveError> {
        let d2 = self.domain * self.domain;
        if table.len() != d2 {
            return Err(SolveError::BadTable { expected: d2, got: table.len() });
        }
        if edge >= self.edge_count() {
            let (s, t) = self.graph.edges.get(edge).copied().unwrap_or((usize::MAX, usize::MAX));
            return Err(SolveError::UnknownEdge(s, t));
        }
        self.edge_costs[edge * d2..(edge + 1) * d2].copy_from_slice(table);
        Ok(())
    }

    pub fn set_vertex_cost(&mut self, v: VertexId, b: usize, cost: Cost) -> Result<(), SolveError> {
        self.check_value(v, b)?;
        self.vertex_costs[v * self.domain + b] = cost;
        Ok(())
    }

    /// Restricts `v` to `values`, which must be non-empty.
    pub fn set_allowed(&mut self, v: VertexId, values: &[usize]) -> Result<(), SolveError> {
        if v >= self.vertex_count() {
            return Err(SolveError::UnknownVertex(v.to_string()));
        }
        if values.is_empty() {
            return Err(SolveError::EmptyAllowedSet(v));
        }
        for &b in values {
            self.check_value(v, b)?;
        }
        let d = self.domain;
        self.allowed[v * d..(v + 1) * d].fill(false);
        for &b in values {
            self.allowed[v * d + b] = true;
        }
        Ok(())
    }

    /// Applies `f` to every edge and vertex cost.
    pub fn map_costs(&self, f: impl Fn(Cost) -> Cost) -> PcspInstance {
        let mut out = self.clone();
        out.edge_costs.iter_mut().for_each(|c| *c = f(*c));
        out.vertex_costs.iter_mut().for_each(|c| *c = f(*c));
        out
    }
}

/// Total cost of `assignment`: every edge's table entry plus every vertex's
/// cost, or infinity if some vertex takes a value outside its allowed set.
pub fn evaluate(instance: &PcspInstance, assignment: &Assignment) -> Result<Cost, SolveError> {
    let a = &assignment.0;
    if a.len() < instance.vertex_count() {
        return Err(SolveError::PartialAssignment(a.len()));
    }
    for (v, &b) in a.iter().enumerate().take(instance.vertex_count()) {
        instance.check_value(v, b)?;
    }
    if (0..instance.vertex_count()).any(|v| !instance.is_allowed(v, a[v])) {
        return Ok(Cost::INFINITY);
    }
    let edges: Cost = instance
        .graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(s, t))| instance.edge_cost(e, a[s], a[t]))
        .sum();
    let vertices: Cost = (0..instance.vertex_count()).map(|v| instance.vertex_cost(v, a[v])).sum();
    Ok(edges + vertices)
}
