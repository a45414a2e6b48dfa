//! Instance builders for the applications: bank selection, lifetime-optimal
//! partial redundancy elimination (LOSPRE), register allocation, and plain
//! graph coloring.

mod bank;
mod coloring;
mod lospre;
mod regalloc;

use thiserror::Error;

use crate::graph::VertexId;
use crate::solver::SolveError;

pub use bank::{ad_hoc_assignment, build_bank_selection, BankSpec};
pub use coloring::{build_graph_coloring, GraphFile, Vertices};
pub use lospre::{build_lospre, EdgeCostEntry, LospreSpec, VertexCostEntry};
pub use regalloc::{build_regalloc, domain_size, RegAlloc, RegAllocSpec, Variable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex {vertex} is preassigned bank {bank}, but there are only {banks} banks")]
    BadPreassignment { vertex: VertexId, bank: usize, banks: usize },
    #[error("entry vertex {0} is preassigned, but its bank is unknown on entry")]
    EntryPreassigned(VertexId),
    #[error("register allocation domain has {size} values, limit is {max}")]
    DomainTooLarge { size: u128, max: u128 },
    #[error("lifetime of `{0}` is not a connected subgraph")]
    DisconnectedLifetime(String),
    #[error("graph file: {0}")]
    BadGraph(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
