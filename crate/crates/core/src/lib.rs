//! Partial constraint satisfaction on the control-flow graphs of structured
//! programs, solved exactly by dynamic programming over a series-parallel-loop
//! decomposition.
//!
//! ```
//! use spl_pcsp::lang::parse_program;
//! use spl_pcsp::solver::{oracle_solve, solve, Cost, PcspInstance};
//! use spl_pcsp::spl::decompose;
//!
//! let tree = parse_program("while x >= 1 do if x >= y then x := x - y; break else y := y - x; continue fi od").unwrap();
//! let decomp = decompose(&tree);
//! let inst = PcspInstance::from_edge_fn(decomp.cfg().graph(), 2, |_, a, b| Cost::finite((a != b) as u64)).unwrap();
//! assert_eq!(solve(&inst, &decomp).unwrap().min_cost, oracle_solve(&inst).unwrap().min_cost);
//! ```

pub mod bench;
pub mod gen;
pub mod graph;
pub mod instances;
pub mod lang;
pub mod solver;
pub mod spl;

// Every chapter of the guide runs as a doctest, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/programs.md")]
    mod programs {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/applications.md")]
    mod applications {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
