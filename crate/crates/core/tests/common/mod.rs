//! Reference implementations shared by the integration tests. None of them
//! goes through the dynamic program.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spl_pcsp::gen::{gen_random_program, random_instance, GenConfig};
use spl_pcsp::solver::{Cost, PcspInstance};
use spl_pcsp::spl::{decompose, Decomposition};

/// Objective of `values` computed straight from the tables.
pub fn objective(inst: &PcspInstance, values: &[usize]) -> Cost {
    if (0..inst.vertex_count()).any(|v| !inst.is_allowed(v, values[v])) {
        return Cost::INFINITY;
    }
    let mut total = Cost::ZERO;
    for (e, &(s, t)) in inst.graph().edges.iter().enumerate() {
        total += inst.edge_cost(e, values[s], values[t]);
    }
    for (v, &b) in values.iter().enumerate() {
        total += inst.vertex_cost(v, b);
    }
    total
}

/// Every assignment in `domain^vertices`, visited like an odometer.
pub fn for_each_assignment(vertices: usize, domain: usize, mut f: impl FnMut(&[usize])) {
    let mut values = vec![0usize; vertices];
    loop {
        f(&values);
        let mut i = 0;
        loop {
            if i == vertices {
                return;
            }
            values[i] += 1;
            if values[i] < domain {
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

/// Plain enumeration of all `d^|V|` assignments.
pub fn brute_force(inst: &PcspInstance) -> Cost {
    let mut best = Cost::INFINITY;
    for_each_assignment(inst.vertex_count(), inst.domain(), |a| best = best.min(objective(inst, a)));
    best
}

/// A random closed program with at most `max_statements` statements whose
/// graph has at most `max_vertices` vertices, with a random instance over a
/// domain of two or three values.
pub fn small_case(seed: u64, max_statements: usize, max_vertices: usize) -> (Decomposition, PcspInstance) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let size = rng.gen_range(1..=max_statements);
        let d = decompose(&gen_random_program(&GenConfig::new(rng.gen(), size)));
        if d.cfg().vertex_count <= max_vertices {
            let domain = rng.gen_range(2..=3);
            let inst = random_instance(d.cfg().graph(), domain, &mut rng);
            return (d, inst);
        }
    }
}

/// Lifetime-optimal PRE cost from the set formula: every edge `(x, y)` with
/// `x ∉ L ∖ I` and `y ∈ U ∪ L` pays `c`, every vertex of `L` pays `l`.
pub fn lospre_direct(
    edges: &[(usize, usize)],
    c: &[Cost],
    l: &[Cost],
    uses: &BTreeSet<usize>,
    inval: &BTreeSet<usize>,
    life: &BTreeSet<usize>,
) -> Cost {
    let live_not_inval: BTreeSet<usize> = life.difference(inval).copied().collect();
    let mut total = Cost::ZERO;
    for (e, &(x, y)) in edges.iter().enumerate() {
        if !live_not_inval.contains(&x) && (uses.contains(&y) || life.contains(&y)) {
            total += c[e];
        }
    }
    for &v in life {
        total += l[v];
    }
    total
}
