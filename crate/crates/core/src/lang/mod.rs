//! The structured, goto-free mini-language.
//!
//! A program is built from opaque atomic statements, `break`, `continue`,
//! sequencing, two-armed conditionals and `while` loops:
//!
//! ```text
//! P := ε | break | continue | P ; P
//!    | if φ then P else P fi | while φ do P od
//! ```
//!
//! Statements and guards carry no semantics; they are kept as text labels so
//! that the control-flow graph can point back at the source.

mod parser;
pub(crate) mod pretty;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use parser::parse_program;
pub use pretty::{pretty_print, tree_to_dot};

/// A 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("program contains no statement")]
    EmptyInput,
}

/// One production of the program grammar.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Epsilon {
        text: String,
    },
    Break,
    Continue,
    Seq {
        left: Box<ParseTree>,
        right: Box<ParseTree>,
    },
    If {
        guard: String,
        then_branch: Box<ParseTree>,
        else_branch: Box<ParseTree>,
    },
    While {
        guard: String,
        body: Box<ParseTree>,
    },
}

/// A parse tree node together with the position it was parsed from.
///
/// Equality compares structure and labels only; spans are metadata.
#[derive(Clone, Debug, Serialize)]
pub struct ParseTree {
    #[serde(flatten)]
    pub node: Node,
    pub span: Span,
}

impl PartialEq for ParseTree {
    fn eq(&self, other: &Self) -> bool {
        match (&self.node, &other.node) {
            (Node::Epsilon { text: a }, Node::Epsilon { text: b }) => a == b,
            (Node::Break, Node::Break) | (Node::Continue, Node::Continue) => true,
            (Node::Seq { left: l1, right: r1 }, Node::Seq { left: l2, right: r2 }) => {
                l1 == l2 && r1 == r2
            }
            (
                Node::If { guard: g1, then_branch: t1, else_branch: e1 },
                Node::If { guard: g2, then_branch: t2, else_branch: e2 },
            ) => g1 == g2 && t1 == t2 && e1 == e2,
            (Node::While { guard: g1, body: b1 }, Node::While { guard: g2, body: b2 }) => {
                g1 == g2 && b1 == b2
            }
            _ => false,
        }
    }
}

impl Eq for ParseTree {}

// Long sequences produce deep left spines; drop them without recursion.
impl Drop for ParseTree {
    fn drop(&mut self) {
        let mut stack: Vec<Box<ParseTree>> = Vec::new();
        take_children(&mut self.node, &mut stack);
        while let Some(mut child) = stack.pop() {
            take_children(&mut child.node, &mut stack);
        }
    }
}

// Boxes move out of the parent as they are, without copying the subtree.
#[allow(clippy::vec_box)]
fn take_children(node: &mut Node, out: &mut Vec<Box<ParseTree>>) {
    match std::mem::replace(node, Node::Break) {
        Node::Seq { left, right } => {
            out.push(left);
            out.push(right);
        }
        Node::If { then_branch, else_branch, .. } => {
            out.push(then_branch);
            out.push(else_branch);
        }
        Node::While { body, .. } => out.push(body),
        leaf => *node = leaf,
    }
}

impl ParseTree {
    pub fn new(node: Node, span: Span) -> Self {
        ParseTree { node, span }
    }

    pub fn epsilon(text: impl Into<String>) -> Self {
        ParseTree::new(Node::Epsilon { text: text.into() }, Span::default())
    }

    pub fn brk() -> Self {
        ParseTree::new(Node::Break, Span::default())
    }

    pub fn cont() -> Self {
        ParseTree::new(Node::Continue, Span::default())
    }

    pub fn seq(left: ParseTree, right: ParseTree) -> Self {
        let span = left.span;
        ParseTree::new(Node::Seq { left: Box::new(left), right: Box::new(right) }, span)
    }

    pub fn if_else(guard: impl Into<String>, then_branch: ParseTree, else_branch: ParseTree) -> Self {
        ParseTree::new(
            Node::If {
                guard: guard.into(),
                then_branch: Box::new(then_branch),
                else_branch: Box::new(else_branch),
            },
            Span::default(),
        )
    }

    pub fn while_do(guard: impl Into<String>, body: ParseTree) -> Self {
        ParseTree::new(Node::While { guard: guard.into(), body: Box::new(body) }, Span::default())
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&ParseTree> {
        match &self.node {
            Node::Epsilon { .. } | Node::Break | Node::Continue => Vec::new(),
            Node::Seq { left, right } => vec![left, right],
            Node::If { then_branch, else_branch, .. } => vec![then_branch, else_branch],
            Node::While { body, .. } => vec![body],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.node, Node::Epsilon { .. } | Node::Break | Node::Continue)
    }

    /// Nodes in post-order (children left to right, then the parent).
    pub fn post_order(&self) -> Vec<&ParseTree> {
        let mut out = Vec::new();
        let mut stack: Vec<(&ParseTree, bool)> = vec![(self, false)];
        while let Some((node, expanded)) = stack.pop() {
            if expanded {
                out.push(node);
                continue;
            }
            stack.push((node, true));
            for child in node.children().into_iter().rev() {
                stack.push((child, false));
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.post_order().len()
    }

    /// Number of statements: every node except `;`.
    pub fn statement_count(&self) -> usize {
        self.post_order().iter().filter(|n| !matches!(n.node, Node::Seq { .. })).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.post_order().iter().filter(|n| n.is_leaf()).count()
    }

    pub fn while_count(&self) -> usize {
        self.post_order().iter().filter(|n| matches!(n.node, Node::While { .. })).count()
    }

    /// Re-associates every sequence to the left, the shape the parser produces.
    ///
    /// Sequencing is associative on control-flow graphs, so this never changes
    /// the program's meaning.
    pub fn canonicalize(self) -> ParseTree {
        let span = self.span;
        let items = flatten_seq(self);
        let mut items = items.into_iter().map(|item| item.canonicalize_inner());
        let first = items.next().expect("a sequence has at least one item");
        let mut acc = items.fold(first, ParseTree::seq);
        acc.span = span;
        acc
    }

    fn canonicalize_inner(mut self) -> ParseTree {
        match std::mem::replace(&mut self.node, Node::Break) {
            Node::If { guard, then_branch, else_branch } => {
                self.node = Node::If {
                    guard,
                    then_branch: Box::new(take(then_branch).canonicalize()),
                    else_branch: Box::new(take(else_branch).canonicalize()),
                };
            }
            Node::While { guard, body } => {
                self.node = Node::While { guard, body: Box::new(take(body).canonicalize()) };
            }
            Node::Seq { .. } => unreachable!("flatten_seq removes sequence nodes"),
            leaf => self.node = leaf,
        }
        self
    }
}

fn take(boxed: Box<ParseTree>) -> ParseTree {
    let mut boxed = boxed;
    let span = boxed.span;
    let node = std::mem::replace(&mut boxed.node, Node::Break);
    ParseTree { node, span }
}

/// The maximal run of non-sequence statements under a tree of `;` nodes.
pub(crate) fn flatten_seq(tree: ParseTree) -> Vec<ParseTree> {
    let mut out = Vec::new();
    let mut stack = vec![tree];
    while let Some(mut t) = stack.pop() {
        match std::mem::replace(&mut t.node, Node::Break) {
            Node::Seq { left, right } => {
                stack.push(take(right));
                stack.push(take(left));
            }
            other => {
                t.node = other;
                out.push(t);
            }
        }
    }
    out
}

/// Result of the closedness check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosednessReport {
    pub is_closed: bool,
    /// Positions of `break`/`continue` statements outside any loop.
    pub violations: Vec<Span>,
}

/// Checks that every `break` and `continue` sits inside a `while` body.
pub fn check_closed(tree: &ParseTree) -> ClosednessReport {
    let mut violations = Vec::new();
    let mut stack = vec![(tree, false)];
    while let Some((node, in_loop)) = stack.pop() {
        match &node.node {
            Node::Break | Node::Continue if !in_loop => violations.push(node.span),
            Node::While { body, .. } => stack.push((body, true)),
            _ => {
                for child in node.children().into_iter().rev() {
                    stack.push((child, in_loop));
                }
            }
        }
    }
    ClosednessReport { is_closed: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_is_closed() {
        let report = check_closed(&ParseTree::epsilon("x := 1"));
        assert!(report.is_closed);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn top_level_break_is_open() {
        let report = check_closed(&ParseTree::brk());
        assert!(!report.is_closed);
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn continue_in_conditional_outside_loop_is_open() {
        let tree = parse_program("x := 1; if b then continue else skip fi").unwrap();
        let report = check_closed(&tree);
        assert_eq!(report.violations, vec![Span::new(1, 19)]);
    }

    #[test]
    fn canonicalize_left_associates() {
        let a = ParseTree::epsilon("a");
        let b = ParseTree::epsilon("b");
        let c = ParseTree::epsilon("c");
        let right = ParseTree::seq(a.clone(), ParseTree::seq(b.clone(), c.clone()));
        let left = ParseTree::seq(ParseTree::seq(a, b), c);
        assert_ne!(right, left);
        assert_eq!(right.canonicalize(), left);
    }

    #[test]
    fn counts() {
        let tree = parse_program(
            "while x >= 1 do if x >= y then x := x - y; break else y := y - x; continue fi od",
        )
        .unwrap();
        assert_eq!(tree.node_count(), 8);
        assert_eq!(tree.leaf_count(), 4);
        assert_eq!(tree.statement_count(), 6);
        assert_eq!(tree.while_count(), 1);
    }

    #[test]
    fn deep_sequence_drops_without_overflow() {
        let mut tree = ParseTree::epsilon("s");
        for _ in 0..200_000 {
            tree = ParseTree::seq(tree, ParseTree::epsilon("s"));
        }
        assert_eq!(check_closed(&tree).violations.len(), 0);
        drop(tree);
    }
}
