use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::InstanceError;
use crate::graph::VertexId;
use crate::solver::{Assignment, Cost, PcspInstance, VertexRef};
use crate::spl::Cfg;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    /// Vertices at which the variable is live; must be weakly connected.
    pub lifetime: Vec<VertexRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegAllocSpec {
    pub registers: usize,
    pub variables: Vec<Variable>,
    /// Cost per live variable whose location differs across an edge.
    #[serde(default = "one")]
    pub switch_cost: Cost,
    /// Cost per live variable held in memory at a vertex.
    #[serde(default)]
    pub spill_cost: Cost,
    #[serde(default = "default_max")]
    pub max_domain: u128,
}

fn one() -> Cost {
    Cost::finite(1)
}

fn default_max() -> u128 {
    64
}

/// A register allocation instance together with the meaning of each value.
#[derive(Clone, Debug)]
pub struct RegAlloc {
    pub instance: PcspInstance,
    /// `maps[value][variable]` is the register, or `None` when the variable is
    /// in memory or not live.
    pub maps: Vec<Vec<Option<usize>>>,
    pub names: Vec<String>,
    pub live: Vec<BTreeSet<usize>>,
}

impl RegAlloc {
    /// Per vertex, the location of each live variable.
    pub fn decode(&self, a: &Assignment) -> Vec<BTreeMap<String, Option<usize>>> {
        self.live
            .iter()
            .enumerate()
            .map(|(v, live)| live.iter().map(|&x| (self.names[x].clone(), self.maps[a.get(v)][x])).collect())
            .collect()
    }
}

/// Number of maps from `variables` variables to `registers` registers or
/// memory that never put two variables in one register:
/// `Σ_j C(variables, j) · registers! / (registers − j)!`.
pub fn domain_size(variables: usize, registers: usize) -> u128 {
    let mut total: u128 = 0;
    let mut choose: u128 = 1; // C(variables, j)
    let mut perm: u128 = 1; // registers! / (registers − j)!
    for j in 0..=variables.min(registers) {
        total = total.saturating_add(choose.saturating_mul(perm));
        choose = choose.saturating_mul((variables - j) as u128) / (j as u128 + 1);
        perm = perm.saturating_mul(registers.saturating_sub(j) as u128);
    }
    total
}

/// Maps in lexicographic order, memory sorting after every register.
fn enumerate_maps(variables: usize, registers: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Option<usize>> = Vec::with_capacity(variables);
    let mut used = vec![false; registers];
    // Explicit stack of the next choice to try at each depth; `registers`
    // stands for memory.
    let mut next = vec![0usize];
    while let Some(choice) = next.last_mut() {
        if current.len() == variables {
            out.push(current.clone());
            next.pop();
            if let Some(Some(r)) = current.pop() {
                used[r] = false;
            }
            continue;
        }
        if *choice > registers {
            next.pop();
            if let Some(Some(r)) = current.pop() {
                used[r] = false;
            }
            continue;
        }
        let c = *choice;
        *choice += 1;
        if c < registers {
            if used[c] {
                continue;
            }
            used[c] = true;
            current.push(Some(c));
        } else {
            current.push(None);
        }
        next.push(0);
    }
    out
}

/// One value per map from variables to registers or memory, with non-live
/// variables forced to memory.
pub fn build_regalloc(cfg: &Cfg, spec: &RegAllocSpec) -> Result<RegAlloc, InstanceError> {
    let n_vars = spec.variables.len();
    let size = domain_size(n_vars, spec.registers);
    if size > spec.max_domain {
        return Err(InstanceError::DomainTooLarge { size, max: spec.max_domain });
    }
    let graph = cfg.graph();
    let specials = cfg.specials();
    let mut live = vec![BTreeSet::new(); cfg.vertex_count];
    for (x, var) in spec.variables.iter().enumerate() {
        let lifetime: BTreeSet<VertexId> = var
            .lifetime
            .iter()
            .map(|r| r.resolve(cfg.vertex_count, Some(&specials)))
            .collect::<Result<_, _>>()?;
        if !graph.is_weakly_connected(&lifetime) {
            return Err(InstanceError::DisconnectedLifetime(var.name.clone()));
        }
        for v in lifetime {
            live[v].insert(x);
        }
    }

    let maps = enumerate_maps(n_vars, spec.registers);
    debug_assert_eq!(maps.len() as u128, size);
    let edges = graph.edges.clone();
    let mut instance = PcspInstance::from_edge_fn(graph, maps.len(), |e, f0, f1| {
        let (s, t) = edges[e];
        let moved = live[s].intersection(&live[t]).filter(|&&x| maps[f0][x] != maps[f1][x]).count();
        (0..moved).map(|_| spec.switch_cost).sum()
    })?;
    for (v, live_here) in live.iter().enumerate() {
        let allowed: Vec<usize> = (0..maps.len())
            .filter(|&f| (0..n_vars).all(|x| live_here.contains(&x) || maps[f][x].is_none()))
            .collect();
        instance.set_allowed(v, &allowed)?;
        for &f in &allowed {
            let spilled = live_here.iter().filter(|&&x| maps[f][x].is_none()).count();
            instance.set_vertex_cost(v, f, (0..spilled).map(|_| spec.spill_cost).sum())?;
        }
    }
    Ok(RegAlloc {
        instance,
        maps,
        names: spec.variables.iter().map(|v| v.name.clone()).collect(),
        live,
    })
}
