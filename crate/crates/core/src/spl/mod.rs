//! Series-parallel-loop graphs.
//!
//! An SPL graph is a directed graph with four distinguished vertices: start
//! `S`, terminate `T`, break `B` and continue `C`. Every such graph is built
//! from three one-edge atomic graphs by the series, parallel and loop
//! operations, and the graphs built this way are exactly the control-flow
//! graphs of structured programs.
//!
//! This module offers the operations on standalone [`SplGraph`] values and
//! [`decompose`], which maps a parse tree to its operation tree and control-flow
//! graph in linear time.

mod cfg;
mod decompose;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;
use thiserror::Error;

pub use crate::graph::{EdgeId, VertexId};
pub use cfg::{Cfg, CfgEdge};
pub use decompose::{decompose, DecompNode, Decomposition, DuplicateEdge, NodeId, Op, Subgraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplError {
    #[error("graphs share vertex ids: {0:?}")]
    OverlappingGraphs(Vec<VertexId>),
}

/// Which of the four distinguished vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    Start,
    Terminate,
    Break,
    Continue,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Start, Role::Terminate, Role::Break, Role::Continue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> &'static str {
        match self {
            Role::Start => "S",
            Role::Terminate => "T",
            Role::Break => "B",
            Role::Continue => "C",
        }
    }
}

/// The `(S, T, B, C)` tuple of a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Specials(pub [VertexId; 4]);

impl Specials {
    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    pub fn role_of(&self, v: VertexId) -> Option<Role> {
        Role::ALL.into_iter().find(|&r| self[r] == v)
    }
}

impl Index<Role> for Specials {
    type Output = VertexId;

    fn index(&self, role: Role) -> &VertexId {
        &self.0[role.index()]
    }
}

impl IndexMut<Role> for Specials {
    fn index_mut(&mut self, role: Role) -> &mut VertexId {
        &mut self.0[role.index()]
    }
}

/// What an edge stands for in the source program.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Stmt(String),
    BreakJump,
    ContinueJump,
    LoopEnter,
    LoopExit,
    LoopBack,
}

impl EdgeLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            EdgeLabel::Stmt(_) => "stmt",
            EdgeLabel::BreakJump => "break-jump",
            EdgeLabel::ContinueJump => "continue-jump",
            EdgeLabel::LoopEnter => "loop-enter",
            EdgeLabel::LoopExit => "loop-exit",
            EdgeLabel::LoopBack => "loop-back",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Stmt(text) => write!(f, "stmt({text})"),
            other => f.write_str(other.kind()),
        }
    }
}

/// The three one-edge graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomicKind {
    Epsilon(String),
    Break,
    Continue,
}

/// Hands out fresh vertex ids.
#[derive(Clone, Debug, Default)]
pub struct VertexAllocator {
    next: VertexId,
}

impl VertexAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> VertexId {
        let v = self.next;
        self.next += 1;
        v
    }

    fn fresh_specials(&mut self) -> Specials {
        Specials([self.fresh(), self.fresh(), self.fresh(), self.fresh()])
    }

    fn skip_past(&mut self, v: VertexId) {
        self.next = self.next.max(v + 1);
    }
}

/// A simple directed graph with its special vertices.
///
/// Edges are keyed by `(src, dst)`; the operations collapse edges that become
/// endpoint-identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<(VertexId, VertexId), EdgeLabel>,
    specials: Specials,
}

impl SplGraph {
    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, &EdgeLabel)> + '_ {
        self.edges.iter().map(|(&(s, d), l)| (s, d, l))
    }

    pub fn edge_label(&self, src: VertexId, dst: VertexId) -> Option<&EdgeLabel> {
        self.edges.get(&(src, dst))
    }

    pub fn has_edge(&self, src: VertexId, dst: VertexId) -> bool {
        self.edges.contains_key(&(src, dst))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn specials(&self) -> Specials {
        self.specials
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.edges.keys().filter(|e| e.1 == v).count()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.edges.keys().filter(|e| e.0 == v).count()
    }

    /// No edge enters `B` or `C`.
    pub fn is_closed(&self) -> bool {
        self.in_degree(self.specials[Role::Break]) == 0
            && self.in_degree(self.specials[Role::Continue]) == 0
    }

    pub(crate) fn from_parts(
        vertices: BTreeSet<VertexId>,
        edges: BTreeMap<(VertexId, VertexId), EdgeLabel>,
        specials: Specials,
    ) -> Self {
        SplGraph { vertices, edges, specials }
    }

    fn check_disjoint(g1: &SplGraph, g2: &SplGraph) -> Result<(), SplError> {
        let shared: Vec<VertexId> = g1.vertices.intersection(&g2.vertices).copied().collect();
        if shared.is_empty() {
            Ok(())
        } else {
            Err(SplError::OverlappingGraphs(shared))
        }
    }

    /// Union of both graphs with the given vertex pairs merged, each pair into
    /// its smaller id. Returns the edges that collapsed onto an existing one.
    fn merge(
        g1: SplGraph,
        g2: SplGraph,
        pairs: &[(VertexId, VertexId)],
        specials: Specials,
    ) -> (SplGraph, Vec<(VertexId, VertexId)>) {
        let rename: BTreeMap<VertexId, VertexId> = pairs
            .iter()
            .flat_map(|&(a, b)| {
                let rep = a.min(b);
                [(a, rep), (b, rep)]
            })
            .collect();
        let map = |v: VertexId| rename.get(&v).copied().unwrap_or(v);
        let vertices = g1.vertices.iter().chain(&g2.vertices).map(|&v| map(v)).collect();
        let mut edges = BTreeMap::new();
        let mut duplicates = Vec::new();
        for ((s, d), label) in g1.edges.into_iter().chain(g2.edges) {
            let key = (map(s), map(d));
            match edges.entry(key) {
                Entry::Occupied(_) => duplicates.push(key),
                Entry::Vacant(slot) => {
                    slot.insert(label);
                }
            }
        }
        (SplGraph { vertices, edges, specials }, duplicates)
    }
}

/// Four fresh vertices and a single edge `S→T`, `S→B` or `S→C`.
pub fn atomic(alloc: &mut VertexAllocator, kind: AtomicKind) -> SplGraph {
    let specials = alloc.fresh_specials();
    let (dst, label) = match kind {
        AtomicKind::Epsilon(text) => (Role::Terminate, EdgeLabel::Stmt(text)),
        AtomicKind::Break => (Role::Break, EdgeLabel::BreakJump),
        AtomicKind::Continue => (Role::Continue, EdgeLabel::ContinueJump),
    };
    let edges = BTreeMap::from([((specials[Role::Start], specials[dst]), label)]);
    SplGraph { vertices: specials.0.into_iter().collect(), edges, specials }
}

/// `g1 ; g2`: merges `T₁` with `S₂`, `B₁` with `B₂` and `C₁` with `C₂`.
pub fn series(g1: SplGraph, g2: SplGraph) -> Result<SplGraph, SplError> {
    SplGraph::check_disjoint(&g1, &g2)?;
    let (a, b) = (g1.specials, g2.specials);
    let pairs = [
        (a[Role::Terminate], b[Role::Start]),
        (a[Role::Break], b[Role::Break]),
        (a[Role::Continue], b[Role::Continue]),
    ];
    let specials = Specials([
        a[Role::Start],
        b[Role::Terminate],
        pairs[1].0.min(pairs[1].1),
        pairs[2].0.min(pairs[2].1),
    ]);
    let (graph, duplicates) = SplGraph::merge(g1, g2, &pairs, specials);
    debug_assert!(duplicates.is_empty(), "series never creates parallel edges");
    Ok(graph)
}

/// `if φ then g1 else g2 fi`: merges the four special vertices pairwise.
///
/// Also returns `E′`, the edges present in both operands once merged. The
/// result keeps a single copy of each, with the left operand's label.
pub fn parallel(g1: SplGraph, g2: SplGraph) -> Result<(SplGraph, Vec<(VertexId, VertexId)>), SplError> {
    SplGraph::check_disjoint(&g1, &g2)?;
    let (a, b) = (g1.specials, g2.specials);
    let pairs: Vec<(VertexId, VertexId)> = Role::ALL.iter().map(|&r| (a[r], b[r])).collect();
    let specials = Specials(std::array::from_fn(|i| pairs[i].0.min(pairs[i].1)));
    Ok(SplGraph::merge(g1, g2, &pairs, specials))
}

/// `while φ do g1 od`: four fresh vertices and the edges `S→S₁`, `S→T`,
/// `T₁→S`, `C₁→S` and `B₁→T`.
pub fn loop_graph(alloc: &mut VertexAllocator, g1: SplGraph) -> SplGraph {
    if let Some(&max) = g1.vertices.iter().next_back() {
        alloc.skip_past(max);
    }
    let specials = alloc.fresh_specials();
    let inner = g1.specials;
    let SplGraph { mut vertices, mut edges, .. } = g1;
    vertices.extend(specials.0);
    let (s, t) = (specials[Role::Start], specials[Role::Terminate]);
    edges.insert((s, inner[Role::Start]), EdgeLabel::LoopEnter);
    edges.insert((s, t), EdgeLabel::LoopExit);
    edges.insert((inner[Role::Terminate], s), EdgeLabel::LoopBack);
    edges.insert((inner[Role::Continue], s), EdgeLabel::LoopBack);
    edges.insert((inner[Role::Break], t), EdgeLabel::LoopExit);
    SplGraph { vertices, edges, specials }
}
