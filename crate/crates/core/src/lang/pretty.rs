use std::fmt::Write;

use super::{Node, ParseTree};

/// Emits the canonical concrete syntax: one statement per line, two-space
/// indentation, `;` at the end of every statement that is followed by another.
///
/// For trees whose sequences are left-associated (everything the parser
/// returns, see [`ParseTree::canonicalize`]) parsing the output gives back
/// an equal tree.
pub fn pretty_print(tree: &ParseTree) -> String {
    let mut lines = Vec::new();
    emit_sequence(tree, 0, &mut lines);
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn seq_items(tree: &ParseTree) -> Vec<&ParseTree> {
    let mut items = Vec::new();
    let mut stack = vec![tree];
    while let Some(t) = stack.pop() {
        match &t.node {
            Node::Seq { left, right } => {
                stack.push(right);
                stack.push(left);
            }
            _ => items.push(t),
        }
    }
    items
}

fn emit_sequence(tree: &ParseTree, depth: usize, lines: &mut Vec<String>) {
    let items = seq_items(tree);
    let last = items.len() - 1;
    for (i, item) in items.into_iter().enumerate() {
        emit_statement(item, depth, lines);
        if i < last {
            lines.last_mut().expect("a statement emits at least one line").push(';');
        }
    }
}

fn emit_statement(tree: &ParseTree, depth: usize, lines: &mut Vec<String>) {
    let pad = "  ".repeat(depth);
    match &tree.node {
        Node::Epsilon { text } => lines.push(format!("{pad}{text}")),
        Node::Break => lines.push(format!("{pad}break")),
        Node::Continue => lines.push(format!("{pad}continue")),
        Node::If { guard, then_branch, else_branch } => {
            lines.push(format!("{pad}if {guard} then"));
            emit_sequence(then_branch, depth + 1, lines);
            lines.push(format!("{pad}else"));
            emit_sequence(else_branch, depth + 1, lines);
            lines.push(format!("{pad}fi"));
        }
        Node::While { guard, body } => {
            lines.push(format!("{pad}while {guard} do"));
            emit_sequence(body, depth + 1, lines);
            lines.push(format!("{pad}od"));
        }
        Node::Seq { .. } => emit_sequence(tree, depth, lines),
    }
}

/// Graphviz rendering of the parse tree.
pub fn tree_to_dot(tree: &ParseTree) -> String {
    let mut out = String::from("digraph parse_tree {\n  node [shape=box];\n");
    let mut next_id = 0usize;
    let mut stack: Vec<(&ParseTree, Option<usize>)> = vec![(tree, None)];
    while let Some((node, parent)) = stack.pop() {
        let id = next_id;
        next_id += 1;
        let label = match &node.node {
            Node::Epsilon { text } => text.clone(),
            Node::Break => "break".into(),
            Node::Continue => "continue".into(),
            Node::Seq { .. } => ";".into(),
            Node::If { guard, .. } => format!("if {guard}"),
            Node::While { guard, .. } => format!("while {guard}"),
        };
        let _ = writeln!(out, "  n{id} [label={}];", dot_quote(&label));
        if let Some(p) = parent {
            let _ = writeln!(out, "  n{p} -> n{id};");
        }
        for child in node.children().into_iter().rev() {
            stack.push((child, Some(id)));
        }
    }
    out.push_str("}\n");
    out
}

pub(crate) fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}
