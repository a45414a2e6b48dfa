use std::collections::BTreeSet;
use std::fmt::Write;

use serde_json::{json, Value};

use super::{EdgeLabel, Role, Specials, VertexId};
use crate::graph::Digraph;
use crate::lang::pretty::dot_quote;
use crate::lang::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgEdge {
    pub src: VertexId,
    pub dst: VertexId,
    pub label: EdgeLabel,
}

/// The control-flow graph of a whole program.
///
/// Vertices are `0..vertex_count`; edges are sorted by `(src, dst)` and no two
/// share both endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub vertex_count: usize,
    pub edges: Vec<CfgEdge>,
    pub entry: VertexId,
    pub exit: VertexId,
    pub break_vertex: VertexId,
    pub continue_vertex: VertexId,
    /// Source positions of the statements each vertex was created for.
    pub spans: Vec<Vec<Span>>,
}

impl Cfg {
    pub fn graph(&self) -> Digraph {
        Digraph::new(self.vertex_count, self.edges.iter().map(|e| (e.src, e.dst)).collect())
    }

    pub fn specials(&self) -> Specials {
        Specials([self.entry, self.exit, self.break_vertex, self.continue_vertex])
    }

    pub fn edge_index(&self, src: VertexId, dst: VertexId) -> Option<usize> {
        self.edges.binary_search_by_key(&(src, dst), |e| (e.src, e.dst)).ok()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.src == v).count()
    }

    /// Edges leaving a vertex with two or more successors.
    pub fn is_branch(&self, edge: usize) -> bool {
        self.out_degree(self.edges[edge].src) >= 2
    }

    /// Default taken-branch set: every branch edge except the one with the
    /// smallest destination id among its siblings.
    pub fn default_taken(&self) -> BTreeSet<(VertexId, VertexId)> {
        // Edges are sorted by (src, dst), so the first of each run is the
        // fall-through.
        let mut taken = BTreeSet::new();
        let mut prev_src = None;
        for (i, e) in self.edges.iter().enumerate() {
            let first_of_run = prev_src != Some(e.src);
            prev_src = Some(e.src);
            if !first_of_run && self.is_branch(i) {
                taken.insert((e.src, e.dst));
            }
        }
        taken
    }

    fn role_name(&self, v: VertexId) -> Option<&'static str> {
        self.specials().role_of(v).map(|r| match r {
            Role::Start => "entry",
            Role::Terminate => "exit",
            Role::Break => "break",
            Role::Continue => "continue",
        })
    }

    /// JSON form: vertices with roles and spans, labelled edges, entry and exit.
    /// Branch edges carry a `taken` flag from `taken`, or the default set.
    pub fn to_json(&self, taken: Option<&BTreeSet<(VertexId, VertexId)>>) -> Value {
        let default_taken;
        let taken = match taken {
            Some(t) => t,
            None => {
                default_taken = self.default_taken();
                &default_taken
            }
        };
        let vertices: Vec<Value> = (0..self.vertex_count)
            .map(|v| {
                let mut obj = json!({
                    "id": v,
                    "spans": self.spans[v].iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                });
                if let Some(role) = self.role_name(v) {
                    obj["role"] = json!(role);
                }
                obj
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut obj = json!({ "src": e.src, "dst": e.dst, "label": e.label.kind() });
                if let EdgeLabel::Stmt(text) = &e.label {
                    obj["text"] = json!(text);
                }
                if self.is_branch(i) {
                    obj["branch"] = json!(true);
                    obj["taken"] = json!(taken.contains(&(e.src, e.dst)));
                }
                obj
            })
            .collect();
        json!({
            "vertices": vertices,
            "edges": edges,
            "entry": self.entry,
            "exit": self.exit,
        })
    }

    /// Graphviz rendering; entry is a double circle, exit a double octagon,
    /// break and continue are boxes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cfg {\n");
        for v in 0..self.vertex_count {
            let shape = match self.specials().role_of(v) {
                Some(Role::Start) => "doublecircle",
                Some(Role::Terminate) => "doubleoctagon",
                Some(Role::Break) | Some(Role::Continue) => "box",
                None => "circle",
            };
            let label = match self.role_name(v) {
                Some(role) => format!("{v} ({role})"),
                None => v.to_string(),
            };
            let _ = writeln!(out, "  v{v} [shape={shape}, label={}];", dot_quote(&label));
        }
        for e in &self.edges {
            let label = match &e.label {
                EdgeLabel::Stmt(text) => text.clone(),
                other => other.kind().to_string(),
            };
            let _ = writeln!(out, "  v{} -> v{} [label={}];", e.src, e.dst, dot_quote(&label));
        }
        out.push_str("}\n");
        out
    }
}
