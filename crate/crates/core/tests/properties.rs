mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spl_pcsp::gen::{gen_random_program, GenConfig};
use spl_pcsp::lang::{check_closed, parse_program, pretty_print};
use spl_pcsp::solver::{evaluate, oracle_solve, solve, Cost, PcspInstance};
use spl_pcsp::spl::{decompose, Op, Role};

use common::{brute_force, small_case};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_oracle(seed in any::<u64>()) {
        let (d, inst) = small_case(seed, 12, 14);
        let sol = solve(&inst, &d).unwrap();
        let oracle = oracle_solve(&inst).unwrap();
        prop_assert_eq!(sol.min_cost, oracle.min_cost);
        if let Some(a) = &sol.assignment {
            prop_assert_eq!(evaluate(&inst, a).unwrap(), sol.min_cost);
            prop_assert!((0..inst.vertex_count()).all(|v| inst.is_allowed(v, a.get(v))));
        } else {
            prop_assert!(sol.min_cost.is_infinite());
        }
    }

    #[test]
    fn both_solvers_match_plain_enumeration(seed in any::<u64>()) {
        let (d, inst) = small_case(seed, 6, 9);
        let expected = brute_force(&inst);
        prop_assert_eq!(solve(&inst, &d).unwrap().min_cost, expected);
        prop_assert_eq!(oracle_solve(&inst).unwrap().min_cost, expected);
    }

    #[test]
    fn raising_a_cost_never_lowers_the_optimum(seed in any::<u64>(), bump in 1u64..20) {
        let (d, inst) = small_case(seed, 10, 14);
        let before = solve(&inst, &d).unwrap().min_cost;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5555);
        let mut raised = inst.clone();
        let k = inst.domain();
        if inst.edge_count() > 0 && rng.gen_bool(0.5) {
            let (e, b0, b1) = (rng.gen_range(0..inst.edge_count()), rng.gen_range(0..k), rng.gen_range(0..k));
            raised.set_edge_cost(e, b0, b1, inst.edge_cost(e, b0, b1) + Cost::finite(bump));
        } else {
            let (v, b) = (rng.gen_range(0..inst.vertex_count()), rng.gen_range(0..k));
            raised.set_vertex_cost(v, b, inst.vertex_cost(v, b) + Cost::finite(bump)).unwrap();
        }
        prop_assert!(solve(&raised, &d).unwrap().min_cost >= before);
    }

    #[test]
    fn each_vertex_is_charged_once(seed in any::<u64>(), size in 1usize..80, k in 1usize..4) {
        let d = decompose(&gen_random_program(&GenConfig::new(seed, size)));
        let mut inst = PcspInstance::new(d.cfg().graph(), k).unwrap();
        for v in 0..inst.vertex_count() {
            for b in 0..k {
                inst.set_vertex_cost(v, b, Cost::finite(1)).unwrap();
            }
        }
        prop_assert_eq!(solve(&inst, &d).unwrap().min_cost, Cost::finite(d.cfg().vertex_count as u64));
    }

    #[test]
    fn hard_constraints_reduce_to_satisfiability(seed in any::<u64>(), shift in 0u64..8) {
        let (d, inst) = small_case(seed, 10, 14);
        // Lowering costs first makes zero entries, and so satisfiable cases, common.
        let base = inst.map_costs(|c| c.value().map_or(c, |v| Cost::finite(v.saturating_sub(shift))));
        let hard = base.map_costs(|c| if c == Cost::ZERO { c } else { Cost::INFINITY });
        let got = solve(&hard, &d).unwrap().min_cost;
        let satisfiable = oracle_solve(&hard).unwrap().min_cost == Cost::ZERO;
        prop_assert_eq!(got, if satisfiable { Cost::ZERO } else { Cost::INFINITY });
    }

    #[test]
    fn generated_programs_round_trip(seed in any::<u64>(), size in 1usize..60) {
        let tree = gen_random_program(&GenConfig::new(seed, size));
        prop_assert!(check_closed(&tree).is_closed);
        prop_assert_eq!(tree.statement_count(), size);
        let text = pretty_print(&tree);
        prop_assert_eq!(parse_program(&text).unwrap(), tree);
    }

    #[test]
    fn decomposition_structure(seed in any::<u64>(), size in 1usize..60) {
        let d = decompose(&gen_random_program(&GenConfig::new(seed, size)));
        let cfg = d.cfg();
        let g = cfg.graph();
        // Closed programs never jump to the outermost break or continue vertex.
        prop_assert_eq!(g.in_degree(cfg.break_vertex), 0);
        prop_assert_eq!(g.in_degree(cfg.continue_vertex), 0);
        // Simple graph with edges sorted by endpoints.
        prop_assert!(cfg.edges.windows(2).all(|w| (w[0].src, w[0].dst) < (w[1].src, w[1].dst)));
        // Every vertex is special at some node, and every edge is introduced
        // by exactly one atomic or loop node.
        let mut special = vec![false; cfg.vertex_count];
        let mut introduced = vec![0usize; cfg.edges.len()];
        for node in d.nodes() {
            for r in Role::ALL {
                special[node.specials[r]] = true;
            }
            match &node.op {
                Op::AtomicEps { edge } | Op::AtomicBreak { edge } | Op::AtomicContinue { edge } => introduced[*edge] += 1,
                Op::Loop { new_edges, .. } => new_edges.iter().for_each(|&e| introduced[e] += 1),
                Op::Parallel { duplicates, .. } => duplicates.iter().for_each(|dup| introduced[dup.edge] -= 1),
                Op::Series { .. } => {}
            }
        }
        prop_assert!(special.iter().all(|&s| s));
        prop_assert!(introduced.iter().all(|&n| n == 1), "{:?}", introduced);
    }
}
