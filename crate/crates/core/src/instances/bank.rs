use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::InstanceError;
use crate::graph::VertexId;
use crate::solver::{Assignment, Cost, PcspInstance, SolveError};
use crate::spl::Cfg;

/// Bank selection for a memory with `banks` banks.
///
/// Values `0..banks` are concrete banks; the value `banks` is ⊥, the state in
/// which the selected bank is unknown. A vertex that accesses memory is
/// preassigned the bank it needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankSpec {
    pub banks: usize,
    #[serde(default)]
    pub preassigned: BTreeMap<VertexId, usize>,
    /// Cost of a selection instruction on an ordinary edge.
    #[serde(default = "one")]
    pub c0: Cost,
    /// Cost on a taken conditional branch, which also needs a jump.
    #[serde(default = "one")]
    pub c1: Cost,
    /// Branch edges that are taken; `None` means the control-flow graph's
    /// default set.
    #[serde(default)]
    pub taken_edges: Option<BTreeSet<(VertexId, VertexId)>>,
    /// Restricts the entry vertex to ⊥.
    #[serde(default = "yes")]
    pub entry_unknown: bool,
}

fn one() -> Cost {
    Cost::finite(1)
}

fn yes() -> bool {
    true
}

impl BankSpec {
    pub fn new(banks: usize) -> BankSpec {
        BankSpec {
            banks,
            preassigned: BTreeMap::new(),
            c0: one(),
            c1: one(),
            taken_edges: None,
            entry_unknown: true,
        }
    }

    pub fn unknown(&self) -> usize {
        self.banks
    }
}

/// Domain `0..=banks`. Staying on a bank or forgetting it is free; moving to a
/// concrete bank different from the current state costs `c1` on a taken
/// branch and `c0` elsewhere.
pub fn build_bank_selection(cfg: &Cfg, spec: &BankSpec) -> Result<PcspInstance, InstanceError> {
    let unknown = spec.unknown();
    for (&v, &bank) in &spec.preassigned {
        if v >= cfg.vertex_count {
            return Err(SolveError::UnknownVertex(v.to_string()).into());
        }
        if bank >= spec.banks {
            return Err(InstanceError::BadPreassignment { vertex: v, bank, banks: spec.banks });
        }
    }
    if spec.entry_unknown && spec.preassigned.contains_key(&cfg.entry) {
        return Err(InstanceError::EntryPreassigned(cfg.entry));
    }
    let taken = match &spec.taken_edges {
        Some(t) => {
            for &(s, d) in t {
                cfg.edge_index(s, d).ok_or(SolveError::UnknownEdge(s, d))?;
            }
            t.clone()
        }
        None => cfg.default_taken(),
    };
    let graph = cfg.graph();
    let is_taken: Vec<bool> = graph.edges.iter().map(|e| taken.contains(e)).collect();
    let mut inst = PcspInstance::from_edge_fn(graph, spec.banks + 1, |e, b0, b1| {
        if b0 == b1 || b1 == unknown {
            Cost::ZERO
        } else if is_taken[e] {
            spec.c1
        } else {
            spec.c0
        }
    })?;
    for (&v, &bank) in &spec.preassigned {
        inst.set_allowed(v, &[bank])?;
    }
    if spec.entry_unknown {
        inst.set_allowed(cfg.entry, &[unknown])?;
    }
    Ok(inst)
}

/// The strategy that selects the bank again before every access: accessing
/// vertices hold their bank and every other vertex is ⊥, so each edge into an
/// access pays for a selection.
pub fn ad_hoc_assignment(cfg: &Cfg, spec: &BankSpec) -> Assignment {
    Assignment(
        (0..cfg.vertex_count)
            .map(|v| spec.preassigned.get(&v).copied().unwrap_or(spec.unknown()))
            .collect(),
    )
}
