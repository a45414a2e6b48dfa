use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range;

use serde_json::{json, Value};

use super::{Cfg, CfgEdge, EdgeId, EdgeLabel, Role, SplGraph, Specials, VertexId};
use crate::lang::{check_closed, ClosednessReport, Node, ParseTree, Span};

/// Index of a node in [`Decomposition::nodes`]; nodes are stored in post-order,
/// so children always precede their parent and the root is last.
pub type NodeId = usize;

/// An edge that both operands of a parallel node contributed, stored once in
/// the graph. `src` and `dst` are the special vertices of the parallel node it
/// joins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DuplicateEdge {
    pub edge: EdgeId,
    pub src: Role,
    pub dst: Role,
}

/// The operation at a decomposition node. Edge and vertex ids are those of
/// the final [`Cfg`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    AtomicEps { edge: EdgeId },
    AtomicBreak { edge: EdgeId },
    AtomicContinue { edge: EdgeId },
    Series {
        left: NodeId,
        right: NodeId,
        /// The vertex formed from `T` of the left and `S` of the right operand.
        merged: VertexId,
    },
    Parallel {
        left: NodeId,
        right: NodeId,
        duplicates: Vec<DuplicateEdge>,
    },
    Loop {
        child: NodeId,
        /// `S→S₁`, `S→T`, `T₁→S`, `C₁→S`, `B₁→T` in that order.
        new_edges: [EdgeId; 5],
    },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::AtomicEps { .. } => "atomic-eps",
            Op::AtomicBreak { .. } => "atomic-break",
            Op::AtomicContinue { .. } => "atomic-continue",
            Op::Series { .. } => "series",
            Op::Parallel { .. } => "parallel",
            Op::Loop { .. } => "loop",
        }
    }

    pub fn children(&self) -> Vec<NodeId> {
        match *self {
            Op::AtomicEps { .. } | Op::AtomicBreak { .. } | Op::AtomicContinue { .. } => Vec::new(),
            Op::Series { left, right, .. } | Op::Parallel { left, right, .. } => vec![left, right],
            Op::Loop { child, .. } => vec![child],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompNode {
    pub op: Op,
    pub specials: Specials,
    pub span: Span,
    /// Smallest node id in this node's subtree.
    pub first_node: NodeId,
}

/// A node's subgraph expressed in final CFG ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub specials: Specials,
}

#[derive(Clone, Debug)]
struct RawEdge {
    src: usize,
    dst: usize,
    label: EdgeLabel,
    /// Parallel node at which this copy was folded into an identical edge.
    collapsed_at: Option<NodeId>,
}

#[derive(Clone, Debug)]
struct RawNode {
    specials: [usize; 4],
    vertices: Range<usize>,
    edges: Range<usize>,
    merges: Range<usize>,
}

/// The operation tree of a program's control-flow graph, plus the graph.
#[derive(Clone, Debug)]
pub struct Decomposition {
    nodes: Vec<DecompNode>,
    cfg: Cfg,
    closedness: ClosednessReport,
    raw_nodes: Vec<RawNode>,
    raw_edges: Vec<RawEdge>,
    merges: Vec<(usize, usize)>,
    canonical: Vec<VertexId>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
}

impl Decomposition {
    pub fn nodes(&self) -> &[DecompNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &DecompNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn cfg(&self) -> &Cfg {
        &self.cfg
    }

    pub fn closedness(&self) -> &ClosednessReport {
        &self.closedness
    }

    /// The subgraph built at `node`, with the vertex ids it had at that point
    /// of the construction (before later merges and the final renumbering).
    pub fn spl_subgraph(&self, node: NodeId) -> SplGraph {
        let raw = &self.raw_nodes[node];
        let base = raw.vertices.start;
        let mut parent: Vec<usize> = raw.vertices.clone().collect();
        let find = |parent: &mut Vec<usize>, mut v: usize| {
            while parent[v - base] != v {
                v = parent[v - base];
            }
            v
        };
        for &(lo, hi) in &self.merges[raw.merges.clone()] {
            let (a, b) = (find(&mut parent, lo), find(&mut parent, hi));
            let (a, b) = (a.min(b), a.max(b));
            parent[b - base] = a;
        }
        let vertices: BTreeSet<usize> =
            raw.vertices.clone().map(|v| find(&mut parent, v)).collect();
        let edges: BTreeMap<(usize, usize), EdgeLabel> = self.raw_edges[raw.edges.clone()]
            .iter()
            .filter(|e| e.collapsed_at.is_none_or(|p| p > node))
            .map(|e| ((find(&mut parent, e.src), find(&mut parent, e.dst)), e.label.clone()))
            .collect();
        SplGraph::from_parts(vertices, edges, Specials(raw.specials))
    }

    /// The subgraph built at `node`, in final CFG ids.
    pub fn subgraph(&self, node: NodeId) -> Subgraph {
        let raw = &self.raw_nodes[node];
        let mut vertices: Vec<VertexId> =
            raw.vertices.clone().map(|v| self.canonical[v]).collect::<BTreeSet<_>>().into_iter().collect();
        vertices.sort_unstable();
        let mut edges: Vec<EdgeId> = self.raw_edges[raw.edges.clone()]
            .iter()
            .filter(|e| e.collapsed_at.is_none_or(|p| p > node))
            .map(|e| self.edge_index[&(self.canonical[e.src], self.canonical[e.dst])])
            .collect();
        edges.sort_unstable();
        Subgraph { vertices, edges, specials: self.nodes[node].specials }
    }

    /// Nested JSON mirroring the operation tree.
    pub fn to_json(&self) -> Value {
        let edge = |e: EdgeId| {
            let ce = &self.cfg.edges[e];
            json!([ce.src, ce.dst])
        };
        let mut built: Vec<Option<Value>> = vec![None; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            let mut obj = json!({
                "op": node.op.name(),
                "specials": node.specials.0,
                "span": format!("{}", node.span),
            });
            let map = obj.as_object_mut().expect("object literal");
            match &node.op {
                Op::AtomicEps { edge: e } | Op::AtomicBreak { edge: e } | Op::AtomicContinue { edge: e } => {
                    map.insert("edge".into(), edge(*e));
                }
                Op::Series { merged, .. } => {
                    map.insert("merged".into(), json!(merged));
                }
                Op::Parallel { duplicates, .. } => {
                    let dups: Vec<Value> = duplicates.iter().map(|d| edge(d.edge)).collect();
                    map.insert("duplicates".into(), Value::Array(dups));
                }
                Op::Loop { new_edges, .. } => {
                    let es: Vec<Value> = new_edges.iter().map(|&e| edge(e)).collect();
                    map.insert("new_edges".into(), Value::Array(es));
                }
            }
            let children: Vec<Value> =
                node.op.children().into_iter().map(|c| built[c].take().expect("post-order")).collect();
            if !children.is_empty() {
                map.insert("children".into(), Value::Array(children));
            }
            built[id] = Some(obj);
        }
        built.pop().flatten().expect("decomposition has a root")
    }

    /// Compact operator notation, e.g. `⊛(∥(⊳(A_ε,A_break),⊳(A_ε,A_continue)))`.
    pub fn to_term(&self) -> String {
        let mut built: Vec<Option<String>> = vec![None; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            let mut take = |c: NodeId| built[c].take().expect("post-order");
            let s = match node.op {
                Op::AtomicEps { .. } => "A_ε".to_string(),
                Op::AtomicBreak { .. } => "A_break".to_string(),
                Op::AtomicContinue { .. } => "A_continue".to_string(),
                Op::Series { left, right, .. } => format!("⊳({},{})", take(left), take(right)),
                Op::Parallel { left, right, .. } => format!("∥({},{})", take(left), take(right)),
                Op::Loop { child, .. } => format!("⊛({})", take(child)),
            };
            built[id] = Some(s);
        }
        built.pop().flatten().expect("decomposition has a root")
    }
}

enum BuildOp {
    Atomic(AtomicTag, usize),
    Series { left: NodeId, right: NodeId, merged: usize },
    Parallel { left: NodeId, right: NodeId, duplicates: Vec<usize> },
    Loop { child: NodeId, new_edges: [usize; 5] },
}

#[derive(Clone, Copy)]
enum AtomicTag {
    Eps,
    Break,
    Continue,
}

struct BuildNode {
    op: BuildOp,
    specials: [usize; 4],
    /// Edges whose endpoints are both special vertices of this node.
    special_edges: Vec<usize>,
    span: Span,
    first_node: NodeId,
    raw: RawNode,
}

#[derive(Default)]
struct Builder {
    parent: Vec<usize>,
    vertex_span: Vec<Span>,
    edges: Vec<RawEdge>,
    merges: Vec<(usize, usize)>,
    nodes: Vec<BuildNode>,
}

impl Builder {
    fn find(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        self.merges.push((lo, hi));
        lo
    }

    fn fresh_specials(&mut self, span: Span) -> [usize; 4] {
        std::array::from_fn(|_| {
            let v = self.parent.len();
            self.parent.push(v);
            self.vertex_span.push(span);
            v
        })
    }

    fn add_edge(&mut self, src: usize, dst: usize, label: EdgeLabel) -> usize {
        self.edges.push(RawEdge { src, dst, label, collapsed_at: None });
        self.edges.len() - 1
    }

    fn starts(&self) -> (usize, usize, usize) {
        (self.parent.len(), self.edges.len(), self.merges.len())
    }

    fn push(&mut self, op: BuildOp, specials: [usize; 4], special_edges: Vec<usize>, span: Span, first_node: NodeId, starts: (usize, usize, usize)) -> NodeId {
        let raw = RawNode {
            specials,
            vertices: starts.0..self.parent.len(),
            edges: starts.1..self.edges.len(),
            merges: starts.2..self.merges.len(),
        };
        self.nodes.push(BuildNode { op, specials, special_edges, span, first_node, raw });
        self.nodes.len() - 1
    }

    fn leaf(&mut self, tag: AtomicTag, label: EdgeLabel, span: Span) -> NodeId {
        let starts = self.starts();
        let sp = self.fresh_specials(span);
        let dst = match tag {
            AtomicTag::Eps => sp[1],
            AtomicTag::Break => sp[2],
            AtomicTag::Continue => sp[3],
        };
        let e = self.add_edge(sp[0], dst, label);
        let id = self.nodes.len();
        self.push(BuildOp::Atomic(tag, e), sp, vec![e], span, id, starts)
    }

    fn child_starts(&self, first: NodeId) -> (usize, usize, usize) {
        let raw = &self.nodes[first].raw;
        (raw.vertices.start, raw.edges.start, raw.merges.start)
    }

    /// Keeps the candidate edges whose endpoints are both in `specials`,
    /// collapsing endpoint-identical copies. Returns the kept edges and the
    /// surviving copy of every collapsed pair.
    fn special_edges(&mut self, candidates: Vec<usize>, specials: [usize; 4], at: NodeId) -> (Vec<usize>, Vec<usize>) {
        let mut kept: Vec<usize> = Vec::new();
        let mut keys: Vec<(usize, usize)> = Vec::new();
        let mut duplicates = Vec::new();
        for e in candidates {
            let key = (self.find(self.edges[e].src), self.find(self.edges[e].dst));
            if !specials.contains(&key.0) || !specials.contains(&key.1) {
                continue;
            }
            if let Some(pos) = keys.iter().position(|&k| k == key) {
                self.edges[e].collapsed_at = Some(at);
                duplicates.push(kept[pos]);
            } else {
                keys.push(key);
                kept.push(e);
            }
        }
        (kept, duplicates)
    }

    fn series(&mut self, left: NodeId, right: NodeId, span: Span) -> NodeId {
        let first = self.nodes[left].first_node;
        let starts = self.child_starts(first);
        let (l, r) = (self.nodes[left].specials, self.nodes[right].specials);
        let merged = self.union(l[1], r[0]);
        let b = self.union(l[2], r[2]);
        let c = self.union(l[3], r[3]);
        let specials = [self.find(l[0]), self.find(r[1]), b, c];
        let mut candidates = self.nodes[left].special_edges.clone();
        candidates.extend_from_slice(&self.nodes[right].special_edges);
        let at = self.nodes.len();
        let (kept, duplicates) = self.special_edges(candidates, specials, at);
        debug_assert!(duplicates.is_empty(), "series never creates parallel edges");
        self.push(BuildOp::Series { left, right, merged }, specials, kept, span, first, starts)
    }

    fn parallel(&mut self, left: NodeId, right: NodeId, span: Span) -> NodeId {
        let first = self.nodes[left].first_node;
        let starts = self.child_starts(first);
        let (l, r) = (self.nodes[left].specials, self.nodes[right].specials);
        let specials: [usize; 4] = std::array::from_fn(|i| self.union(l[i], r[i]));
        let mut candidates = self.nodes[left].special_edges.clone();
        candidates.extend_from_slice(&self.nodes[right].special_edges);
        let at = self.nodes.len();
        let (kept, duplicates) = self.special_edges(candidates, specials, at);
        self.push(BuildOp::Parallel { left, right, duplicates }, specials, kept, span, first, starts)
    }

    fn looped(&mut self, child: NodeId, span: Span) -> NodeId {
        let first = self.nodes[child].first_node;
        let starts = self.child_starts(first);
        let inner = self.nodes[child].specials;
        let sp = self.fresh_specials(span);
        let new_edges = [
            self.add_edge(sp[0], inner[0], EdgeLabel::LoopEnter),
            self.add_edge(sp[0], sp[1], EdgeLabel::LoopExit),
            self.add_edge(inner[1], sp[0], EdgeLabel::LoopBack),
            self.add_edge(inner[3], sp[0], EdgeLabel::LoopBack),
            self.add_edge(inner[2], sp[1], EdgeLabel::LoopExit),
        ];
        let kept = vec![new_edges[1]];
        self.push(BuildOp::Loop { child, new_edges }, sp, kept, span, first, starts)
    }
}

/// Maps a parse tree to its SPL decomposition and control-flow graph.
///
/// Vertices are allocated in post-order, four per atomic or loop node in the
/// order `S, T, B, C`. Merged vertices keep the smaller id, and the final
/// graph renumbers the surviving ids densely in ascending order, so equal
/// trees always give identical graphs. Open programs are accepted with a
/// logged warning.
pub fn decompose(tree: &ParseTree) -> Decomposition {
    let closedness = check_closed(tree);
    if !closedness.is_closed {
        let at: Vec<String> = closedness.violations.iter().map(|s| s.to_string()).collect();
        log::warn!("program is not closed: break/continue outside a loop at {}", at.join(", "));
    }

    let mut b = Builder::default();
    let mut results: Vec<NodeId> = Vec::new();
    for t in tree.post_order() {
        let id = match &t.node {
            Node::Epsilon { text } => b.leaf(AtomicTag::Eps, EdgeLabel::Stmt(text.clone()), t.span),
            Node::Break => b.leaf(AtomicTag::Break, EdgeLabel::BreakJump, t.span),
            Node::Continue => b.leaf(AtomicTag::Continue, EdgeLabel::ContinueJump, t.span),
            Node::Seq { .. } => {
                let right = results.pop().expect("post-order");
                let left = results.pop().expect("post-order");
                b.series(left, right, t.span)
            }
            Node::If { .. } => {
                let right = results.pop().expect("post-order");
                let left = results.pop().expect("post-order");
                b.parallel(left, right, t.span)
            }
            Node::While { .. } => {
                let child = results.pop().expect("post-order");
                b.looped(child, t.span)
            }
        };
        results.push(id);
    }
    debug_assert_eq!(results.len(), 1);
    finish(b, closedness)
}

fn finish(mut b: Builder, closedness: ClosednessReport) -> Decomposition {
    let n_raw = b.parent.len();
    let roots: Vec<usize> = (0..n_raw).map(|v| b.find(v)).collect();
    let mut canonical = vec![usize::MAX; n_raw];
    let mut next = 0;
    for v in 0..n_raw {
        if roots[v] == v {
            canonical[v] = next;
            next += 1;
        }
    }
    for v in 0..n_raw {
        canonical[v] = canonical[roots[v]];
    }
    let vertex_count = next;

    let mut spans: Vec<BTreeSet<Span>> = vec![BTreeSet::new(); vertex_count];
    for v in 0..n_raw {
        spans[canonical[v]].insert(b.vertex_span[v]);
    }

    let mut edges: Vec<CfgEdge> = b
        .edges
        .iter()
        .filter(|e| e.collapsed_at.is_none())
        .map(|e| CfgEdge { src: canonical[e.src], dst: canonical[e.dst], label: e.label.clone() })
        .collect();
    edges.sort_by_key(|e| (e.src, e.dst));
    let edge_index: HashMap<(VertexId, VertexId), EdgeId> =
        edges.iter().enumerate().map(|(i, e)| ((e.src, e.dst), i)).collect();
    debug_assert_eq!(edge_index.len(), edges.len(), "control-flow graph is simple");

    let canon_edge = |e: usize| edge_index[&(canonical[b.edges[e].src], canonical[b.edges[e].dst])];
    let canon_specials = |sp: [usize; 4]| Specials(sp.map(|v| canonical[v]));

    let mut nodes = Vec::with_capacity(b.nodes.len());
    let mut raw_nodes = Vec::with_capacity(b.nodes.len());
    for node in b.nodes.drain(..).collect::<Vec<_>>() {
        let specials = canon_specials(node.specials);
        let op = match node.op {
            BuildOp::Atomic(AtomicTag::Eps, e) => Op::AtomicEps { edge: canon_edge(e) },
            BuildOp::Atomic(AtomicTag::Break, e) => Op::AtomicBreak { edge: canon_edge(e) },
            BuildOp::Atomic(AtomicTag::Continue, e) => Op::AtomicContinue { edge: canon_edge(e) },
            BuildOp::Series { left, right, merged } => Op::Series { left, right, merged: canonical[merged] },
            BuildOp::Parallel { left, right, duplicates } => Op::Parallel {
                left,
                right,
                duplicates: duplicates
                    .into_iter()
                    .map(|e| DuplicateEdge {
                        edge: canon_edge(e),
                        src: specials.role_of(canonical[b.edges[e].src]).expect("special endpoint"),
                        dst: specials.role_of(canonical[b.edges[e].dst]).expect("special endpoint"),
                    })
                    .collect(),
            },
            BuildOp::Loop { child, new_edges } => Op::Loop { child, new_edges: new_edges.map(canon_edge) },
        };
        nodes.push(DecompNode { op, specials, span: node.span, first_node: node.first_node });
        raw_nodes.push(node.raw);
    }

    let root = nodes.last().expect("decomposition has a root").specials;
    let cfg = Cfg {
        vertex_count,
        edges,
        entry: root[Role::Start],
        exit: root[Role::Terminate],
        break_vertex: root[Role::Break],
        continue_vertex: root[Role::Continue],
        spans: spans.into_iter().map(|s| s.into_iter().collect()).collect(),
    };
    Decomposition {
        nodes,
        cfg,
        closedness,
        raw_nodes,
        raw_edges: b.edges,
        merges: b.merges,
        canonical,
        edge_index,
    }
}
