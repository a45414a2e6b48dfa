//! Seeded random programs and instances.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Digraph;
use crate::lang::ParseTree;
use crate::solver::{Cost, PcspInstance};

/// Shape of the generated programs. `size` is the number of statements
/// (every node but sequencing), produced exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub size: usize,
    pub p_seq: f64,
    pub p_if: f64,
    pub p_while: f64,
    pub p_break: f64,
    pub p_continue: f64,
}

impl GenConfig {
    pub fn new(seed: u64, size: usize) -> GenConfig {
        GenConfig { seed, size, p_seq: 0.40, p_if: 0.25, p_while: 0.20, p_break: 0.075, p_continue: 0.075 }
    }
}

enum Task {
    Build { size: usize, in_loop: bool },
    Seq,
    If(String),
    While(String),
}

/// A closed program with exactly `config.size` statements; the same config
/// always gives the same program. Sizes below one are treated as one.
///
/// ```
/// use spl_pcsp::gen::{gen_random_program, GenConfig};
/// use spl_pcsp::lang::check_closed;
///
/// let tree = gen_random_program(&GenConfig::new(42, 8));
/// assert_eq!(tree.statement_count(), 8);
/// assert!(check_closed(&tree).is_closed);
/// assert_eq!(tree, gen_random_program(&GenConfig::new(42, 8)));
/// ```
pub fn gen_random_program(config: &GenConfig) -> ParseTree {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut fresh = 0usize;
    let mut name = || {
        fresh += 1;
        fresh
    };
    let mut tasks = vec![Task::Build { size: config.size.max(1), in_loop: false }];
    let mut done: Vec<ParseTree> = Vec::new();
    while let Some(task) = tasks.pop() {
        match task {
            Task::Build { size: 1, in_loop } => {
                // Jumps only where they keep the program closed; plain
                // statements take the remaining probability.
                let roll: f64 = rng.gen();
                let leaf = if in_loop && roll < config.p_break {
                    ParseTree::brk()
                } else if in_loop && roll < config.p_break + config.p_continue {
                    ParseTree::cont()
                } else {
                    let (i, j, k) = (name(), rng.gen_range(0..8), rng.gen_range(1..10));
                    ParseTree::epsilon(format!("v{i} := v{j} + {k}"))
                };
                done.push(leaf);
            }
            Task::Build { size, in_loop } => {
                let weights = [config.p_seq, if size >= 3 { config.p_if } else { 0.0 }, config.p_while];
                let pick = WeightedIndex::new(weights).map(|w| w.sample(&mut rng)).unwrap_or(0);
                match pick {
                    0 => {
                        let left = rng.gen_range(1..size);
                        tasks.push(Task::Seq);
                        tasks.push(Task::Build { size: size - left, in_loop });
                        tasks.push(Task::Build { size: left, in_loop });
                    }
                    1 => {
                        let then_size = rng.gen_range(1..size - 1);
                        tasks.push(Task::If(format!("g{}", name())));
                        tasks.push(Task::Build { size: size - 1 - then_size, in_loop });
                        tasks.push(Task::Build { size: then_size, in_loop });
                    }
                    _ => {
                        tasks.push(Task::While(format!("g{}", name())));
                        tasks.push(Task::Build { size: size - 1, in_loop: true });
                    }
                }
            }
            Task::Seq => {
                let right = done.pop().expect("built");
                let left = done.pop().expect("built");
                done.push(ParseTree::seq(left, right));
            }
            Task::If(guard) => {
                let else_branch = done.pop().expect("built");
                let then_branch = done.pop().expect("built");
                done.push(ParseTree::if_else(guard, then_branch, else_branch));
            }
            Task::While(guard) => {
                let body = done.pop().expect("built");
                done.push(ParseTree::while_do(guard, body));
            }
        }
    }
    done.pop().expect("one program").canonicalize()
}

/// Edge costs uniform in `0..=10` with one entry in ten infinite, vertex costs
/// uniform in `0..=10`, and one vertex in five restricted to a random
/// non-empty subset of the domain.
pub fn random_instance(graph: Digraph, domain: usize, rng: &mut impl Rng) -> PcspInstance {
    let mut inst = PcspInstance::new(graph, domain).expect("domain is non-empty");
    for e in 0..inst.edge_count() {
        for b0 in 0..domain {
            for b1 in 0..domain {
                let c = if rng.gen_bool(0.1) { Cost::INFINITY } else { Cost::finite(rng.gen_range(0..=10)) };
                inst.set_edge_cost(e, b0, b1, c);
            }
        }
    }
    for v in 0..inst.vertex_count() {
        for b in 0..domain {
            inst.set_vertex_cost(v, b, Cost::finite(rng.gen_range(0..=10))).expect("in range");
        }
        if rng.gen_bool(0.2) {
            let mut subset: Vec<usize> = (0..domain).filter(|_| rng.gen_bool(0.5)).collect();
            if subset.is_empty() {
                subset.push(rng.gen_range(0..domain));
            }
            inst.set_allowed(v, &subset).expect("non-empty subset");
        }
    }
    inst
}
