mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spl_pcsp::gen::{gen_random_program, GenConfig};
use spl_pcsp::instances::{
    build_bank_selection, build_lospre, build_regalloc, domain_size, BankSpec, EdgeCostEntry, LospreSpec,
    RegAllocSpec, Variable, VertexCostEntry,
};
use spl_pcsp::solver::{evaluate, oracle_solve, solve, Assignment, Cost, VertexRef};
use spl_pcsp::spl::{decompose, Decomposition};

use common::lospre_direct;

fn program(rng: &mut ChaCha8Rng, max_statements: usize, max_vertices: usize) -> Decomposition {
    loop {
        let size = rng.gen_range(1..=max_statements);
        let d = decompose(&gen_random_program(&GenConfig::new(rng.gen(), size)));
        if d.cfg().vertex_count <= max_vertices {
            return d;
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lospre_objective_matches_set_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = program(&mut rng, 15, 40);
        let cfg = d.cfg();
        let n = cfg.vertex_count;
        let uses = random_subset(&mut rng, n, 0.3);
        let inval = random_subset(&mut rng, n, 0.3);
        let life = random_subset(&mut rng, n, 0.5);
        let c: Vec<Cost> = cfg.edges.iter().map(|_| Cost::finite(rng.gen_range(0..=10))).collect();
        let l: Vec<Cost> = (0..n).map(|_| Cost::finite(rng.gen_range(0..=10))).collect();
        let spec = LospreSpec {
            uses: uses.iter().map(|&v| VertexRef::Id(v)).collect(),
            invalidating: inval.iter().map(|&v| VertexRef::Id(v)).collect(),
            edge_costs: cfg.edges.iter().zip(&c).map(|(e, &cost)| EdgeCostEntry { src: VertexRef::Id(e.src), dst: VertexRef::Id(e.dst), cost }).collect(),
            default_edge_cost: Cost::finite(1),
            vertex_costs: l.iter().enumerate().map(|(v, &cost)| VertexCostEntry { v: VertexRef::Id(v), cost }).collect(),
            default_vertex_cost: Cost::ZERO,
        };
        let inst = build_lospre(cfg, &spec).unwrap();
        let indicator = Assignment((0..n).map(|v| life.contains(&v) as usize).collect());
        let mut full_inval = inval.clone();
        full_inval.extend([cfg.entry, cfg.exit]);
        let edges: Vec<(usize, usize)> = cfg.edges.iter().map(|e| (e.src, e.dst)).collect();
        prop_assert_eq!(evaluate(&inst, &indicator).unwrap(), lospre_direct(&edges, &c, &l, &uses, &full_inval, &life));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lospre_solver_matches_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = program(&mut rng, 10, 16);
        let n = d.cfg().vertex_count;
        let mut spec = LospreSpec::new(random_subset(&mut rng, n, 0.3));
        spec.invalidating = random_subset(&mut rng, n, 0.2).into_iter().map(VertexRef::Id).collect();
        spec.default_vertex_cost = Cost::finite(rng.gen_range(0..3));
        let inst = build_lospre(d.cfg(), &spec).unwrap();
        prop_assert_eq!(solve(&inst, &d).unwrap().min_cost, oracle_solve(&inst).unwrap().min_cost);
    }

    #[test]
    fn bank_objective_matches_direct_count(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = program(&mut rng, 12, 30);
        let cfg = d.cfg();
        let banks = rng.gen_range(1..=3);
        let mut spec = BankSpec::new(banks);
        spec.c0 = Cost::finite(rng.gen_range(1..4));
        spec.c1 = Cost::finite(rng.gen_range(1..6));
        for v in random_subset(&mut rng, cfg.vertex_count, 0.2) {
            if v != cfg.entry {
                spec.preassigned.insert(v, rng.gen_range(0..banks));
            }
        }
        let inst = build_bank_selection(cfg, &spec).unwrap();
        let taken = cfg.default_taken();
        let unknown = banks;
        let values: Vec<usize> = (0..cfg.vertex_count)
            .map(|v| {
                if v == cfg.entry {
                    unknown
                } else if let Some(&b) = spec.preassigned.get(&v) {
                    b
                } else {
                    rng.gen_range(0..=banks)
                }
            })
            .collect();
        let mut expected = Cost::ZERO;
        for e in &cfg.edges {
            let (b0, b1) = (values[e.src], values[e.dst]);
            if b1 != unknown && b1 != b0 {
                expected += if taken.contains(&(e.src, e.dst)) { spec.c1 } else { spec.c0 };
            }
        }
        prop_assert_eq!(evaluate(&inst, &Assignment(values)).unwrap(), expected);
        if cfg.vertex_count <= 12 {
            prop_assert_eq!(solve(&inst, &d).unwrap().min_cost, oracle_solve(&inst).unwrap().min_cost);
        }
    }
}

/// Lifetime grown from a random vertex along random incident edges.
fn connected_lifetime(rng: &mut ChaCha8Rng, d: &Decomposition, target: usize) -> BTreeSet<usize> {
    let cfg = d.cfg();
    let mut set = BTreeSet::from([rng.gen_range(0..cfg.vertex_count)]);
    for _ in 0..target {
        let frontier: Vec<usize> = cfg
            .edges
            .iter()
            .filter_map(|e| match (set.contains(&e.src), set.contains(&e.dst)) {
                (true, false) => Some(e.dst),
                (false, true) => Some(e.src),
                _ => None,
            })
            .collect();
        match frontier.choose(rng) {
            Some(&v) => set.insert(v),
            None => break,
        };
    }
    set
}

#[test]
fn regalloc_domain_size_matches_enumeration() {
    for vars in 0..5usize {
        for regs in 0..5usize {
            let mut count = 0u128;
            common::for_each_assignment(vars, regs + 1, |f| {
                let in_regs: Vec<usize> = f.iter().copied().filter(|&r| r < regs).collect();
                let distinct: BTreeSet<usize> = in_regs.iter().copied().collect();
                count += (distinct.len() == in_regs.len()) as u128;
            });
            assert_eq!(domain_size(vars, regs), count, "{vars} variables, {regs} registers");
        }
    }
    assert_eq!(domain_size(1, 1), 2);
    assert_eq!(domain_size(2, 2), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn regalloc_is_injective_and_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = program(&mut rng, 8, 11);
        let vars = rng.gen_range(1..=3);
        let spec = RegAllocSpec {
            registers: rng.gen_range(1..=2),
            variables: (0..vars)
                .map(|i| Variable {
                    name: format!("x{i}"),
                    lifetime: connected_lifetime(&mut rng, &d, 4).into_iter().map(VertexRef::Id).collect(),
                })
                .collect(),
            switch_cost: Cost::finite(rng.gen_range(1..4)),
            spill_cost: Cost::finite(rng.gen_range(0..3)),
            max_domain: 64,
        };
        let ra = build_regalloc(d.cfg(), &spec).unwrap();
        let sol = solve(&ra.instance, &d).unwrap();
        prop_assert_eq!(sol.min_cost, oracle_solve(&ra.instance).unwrap().min_cost);
        let a = sol.assignment.unwrap();
        for at_vertex in ra.decode(&a) {
            let regs: Vec<usize> = at_vertex.values().filter_map(|r| *r).collect();
            let distinct: BTreeSet<usize> = regs.iter().copied().collect();
            prop_assert_eq!(regs.len(), distinct.len());
        }
    }
}
