use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::InstanceError;
use crate::graph::VertexId;
use crate::solver::{Cost, PcspInstance, VertexRef};
use crate::spl::Cfg;

/// Lifetime-optimal partial redundancy elimination for one expression.
///
/// `uses` are the vertices that need the expression's value and `invalidating`
/// the vertices that clobber an operand. A solution is a life set `L`: the
/// vertices at which the value is kept in a temporary. The value must be
/// computed on every edge `(x, y)` with `x ∉ L ∖ I` and `y ∈ U ∪ L`; each such
/// edge costs `c(e)` and each vertex of `L` costs `l(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LospreSpec {
    pub uses: Vec<VertexRef>,
    #[serde(default)]
    pub invalidating: Vec<VertexRef>,
    #[serde(default)]
    pub edge_costs: Vec<EdgeCostEntry>,
    /// `c(e)` for edges not listed in `edge_costs`.
    #[serde(default = "one")]
    pub default_edge_cost: Cost,
    #[serde(default)]
    pub vertex_costs: Vec<VertexCostEntry>,
    /// `l(v)` for vertices not listed in `vertex_costs`.
    #[serde(default)]
    pub default_vertex_cost: Cost,
}

fn one() -> Cost {
    Cost::finite(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCostEntry {
    pub src: VertexRef,
    pub dst: VertexRef,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCostEntry {
    pub v: VertexRef,
    pub cost: Cost,
}

impl LospreSpec {
    pub fn new(uses: impl IntoIterator<Item = VertexId>) -> LospreSpec {
        LospreSpec {
            uses: uses.into_iter().map(VertexRef::Id).collect(),
            invalidating: Vec::new(),
            edge_costs: Vec::new(),
            default_edge_cost: one(),
            vertex_costs: Vec::new(),
            default_vertex_cost: Cost::ZERO,
        }
    }
}

/// Domain `{0, 1}`: value 1 puts the vertex in the life set. Entry and exit
/// always count as invalidating.
pub fn build_lospre(cfg: &Cfg, spec: &LospreSpec) -> Result<PcspInstance, InstanceError> {
    let n = cfg.vertex_count;
    let specials = cfg.specials();
    let resolve_all = |refs: &[VertexRef]| -> Result<BTreeSet<VertexId>, InstanceError> {
        refs.iter().map(|r| Ok(r.resolve(n, Some(&specials))?)).collect()
    };
    let uses = resolve_all(&spec.uses)?;
    let mut inval = resolve_all(&spec.invalidating)?;
    inval.insert(cfg.entry);
    inval.insert(cfg.exit);

    let graph = cfg.graph();
    let mut c = vec![spec.default_edge_cost; graph.edges.len()];
    for entry in &spec.edge_costs {
        let (s, t) = (entry.src.resolve(n, Some(&specials))?, entry.dst.resolve(n, Some(&specials))?);
        let e = cfg.edge_index(s, t).ok_or(crate::solver::SolveError::UnknownEdge(s, t))?;
        c[e] = entry.cost;
    }
    let edges = graph.edges.clone();
    let mut inst = PcspInstance::from_edge_fn(graph, 2, |e, lx, ly| {
        let (x, y) = edges[e];
        let carried = lx == 1 && !inval.contains(&x);
        let needed = uses.contains(&y) || ly == 1;
        if !carried && needed {
            c[e]
        } else {
            Cost::ZERO
        }
    })?;
    let mut l = vec![spec.default_vertex_cost; n];
    for entry in &spec.vertex_costs {
        l[entry.v.resolve(n, Some(&specials))?] = entry.cost;
    }
    for (v, &cost) in l.iter().enumerate() {
        inst.set_vertex_cost(v, 1, cost)?;
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;
    use crate::solver::{evaluate, oracle_solve, solve, Assignment};
    use crate::spl::decompose;

    #[test]
    fn empty_life_set_pays_every_edge_into_a_use() {
        let d = decompose(&parse_program("a; if p then b else c fi; d").unwrap());
        let cfg = d.cfg();
        let uses: Vec<VertexId> = vec![cfg.exit, cfg.edges[2].dst];
        let inst = build_lospre(cfg, &LospreSpec::new(uses.iter().copied())).unwrap();
        let expected = cfg.edges.iter().filter(|e| uses.contains(&e.dst)).count() as u64;
        let empty = Assignment(vec![0; cfg.vertex_count]);
        assert_eq!(evaluate(&inst, &empty).unwrap(), Cost::finite(expected));
    }

    #[test]
    fn single_statement_needs_one_computation() {
        let d = decompose(&parse_program("x := a + b").unwrap());
        let inst = build_lospre(d.cfg(), &LospreSpec::new([d.cfg().exit])).unwrap();
        assert_eq!(oracle_solve(&inst).unwrap().min_cost, Cost::finite(1));
        assert_eq!(solve(&inst, &d).unwrap().min_cost, Cost::finite(1));
    }

    #[test]
    fn infinite_lifetime_cost_keeps_life_set_empty() {
        let d = decompose(&parse_program("a; while p do b; c od; e").unwrap());
        let cfg = d.cfg();
        let uses: Vec<VertexId> = cfg.edges.iter().filter(|e| e.label.kind() == "stmt").map(|e| e.dst).collect();
        let mut spec = LospreSpec::new(uses.iter().copied());
        spec.default_vertex_cost = Cost::INFINITY;
        let inst = build_lospre(cfg, &spec).unwrap();
        let expected = cfg.edges.iter().filter(|e| uses.contains(&e.dst)).count() as u64;
        let sol = solve(&inst, &d).unwrap();
        assert_eq!(sol.min_cost, Cost::finite(expected));
        assert!(sol.assignment.unwrap().0.iter().all(|&b| b == 0));
    }
}
