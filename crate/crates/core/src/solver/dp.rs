use super::{Assignment, Cost, PcspInstance, Solution, SolveError};
use crate::spl::{Decomposition, NodeId, Op, Specials};

/// Costs of one decomposition node, indexed by the values of its four special
/// vertices in the order `S, T, B, C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTable {
    domain: usize,
    values: Vec<Cost>,
}

impl DpTable {
    fn filled(domain: usize, cost: Cost) -> DpTable {
        DpTable { domain, values: vec![cost; domain.pow(4)] }
    }

    #[inline]
    fn index(&self, x: [usize; 4]) -> usize {
        let d = self.domain;
        ((x[0] * d + x[1]) * d + x[2]) * d + x[3]
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    /// Panics if a value is outside the domain.
    pub fn get(&self, x: [usize; 4]) -> Cost {
        assert!(x.iter().all(|&b| b < self.domain), "value outside the domain");
        self.values[self.index(x)]
    }

    fn unindex(&self, mut i: usize) -> [usize; 4] {
        let d = self.domain;
        let mut x = [0; 4];
        for slot in x.iter_mut().rev() {
            *slot = i % d;
            i /= d;
        }
        x
    }
}

/// What reconstruction needs to recover the children's special values.
enum Choice {
    None,
    /// Value of the merged vertex, per table entry.
    Series(Vec<u32>),
    /// Child table index, per `(S, T)` pair.
    Loop(Vec<u32>),
}

struct Ctx<'a> {
    inst: &'a PcspInstance,
    d: usize,
}

impl Ctx<'_> {
    #[inline]
    fn vc(&self, v: usize, b: usize) -> Cost {
        if self.inst.is_allowed(v, b) {
            self.inst.vertex_cost(v, b)
        } else {
            Cost::INFINITY
        }
    }

    fn specials_allowed(&self, sp: &Specials, x: [usize; 4]) -> bool {
        (0..4).all(|i| self.inst.is_allowed(sp.0[i], x[i]))
    }

    /// Sets every entry whose `X` violates an allowed set to infinity.
    fn mask(&self, sp: &Specials, table: &mut DpTable) {
        for i in 0..table.values.len() {
            if !self.specials_allowed(sp, table.unindex(i)) {
                table.values[i] = Cost::INFINITY;
            }
        }
    }

    fn atomic(&self, sp: &Specials, edge: usize, dst_slot: usize) -> DpTable {
        let d = self.d;
        let mut t = DpTable::filled(d, Cost::ZERO);
        for i in 0..t.values.len() {
            let x = t.unindex(i);
            t.values[i] = self.inst.edge_cost(edge, x[0], x[dst_slot]);
        }
        self.mask(sp, &mut t);
        t
    }

    fn series(&self, sp: &Specials, merged: usize, left: &DpTable, right: &DpTable) -> (DpTable, Vec<u32>) {
        let d = self.d;
        let mut t = DpTable::filled(d, Cost::INFINITY);
        let mut choice = vec![0u32; t.values.len()];
        let merged_cost: Vec<Cost> = (0..d).map(|m| self.vc(merged, m)).collect();
        for (i, slot) in choice.iter_mut().enumerate() {
            let [s, tt, b, c] = t.unindex(i);
            if !self.specials_allowed(sp, [s, tt, b, c]) {
                continue;
            }
            let mut best = Cost::INFINITY;
            let mut arg = 0;
            for (m, &mc) in merged_cost.iter().enumerate() {
                if mc.is_infinite() {
                    continue;
                }
                let total = left.get([s, m, b, c]) + right.get([m, tt, b, c]) + mc;
                if total < best {
                    best = total;
                    arg = m;
                }
            }
            t.values[i] = best;
            *slot = arg as u32;
        }
        (t, choice)
    }

    fn parallel(&self, decomp: &Decomposition, node: NodeId, left: &DpTable, right: &DpTable) -> DpTable {
        let Op::Parallel { duplicates, .. } = &decomp.node(node).op else { unreachable!() };
        let sp = decomp.node(node).specials;
        let mut t = DpTable::filled(self.d, Cost::INFINITY);
        for i in 0..t.values.len() {
            let x = t.unindex(i);
            if !self.specials_allowed(&sp, x) {
                continue;
            }
            let sum = left.values[i] + right.values[i];
            if sum.is_infinite() {
                continue;
            }
            // Both operands paid for each duplicate; keep one payment.
            let dup: Cost = duplicates
                .iter()
                .map(|e| self.inst.edge_cost(e.edge, x[e.src.index()], x[e.dst.index()]))
                .sum();
            t.values[i] = sum.minus_finite(dup);
        }
        t
    }

    fn looped(&self, sp: &Specials, inner: &Specials, new_edges: [usize; 5], child: &DpTable) -> (DpTable, Vec<u32>) {
        let d = self.d;
        let [enter, exit, back_t, back_c, break_exit] = new_edges;
        let [s1, t1, b1, c1] = inner.0;
        let ec = |e, b0, b1| self.inst.edge_cost(e, b0, b1);
        // Vertex charges of the child's specials, which become interior here.
        let internal: Vec<Cost> = (0..child.values.len())
            .map(|j| {
                let [a, bt, bb, bc] = child.unindex(j);
                child.values[j] + self.vc(s1, a) + self.vc(t1, bt) + self.vc(b1, bb) + self.vc(c1, bc)
            })
            .collect();
        let mut best_st = vec![Cost::INFINITY; d * d];
        let mut choice = vec![0u32; d * d];
        for s in 0..d {
            if !self.inst.is_allowed(sp.0[0], s) {
                continue;
            }
            for tt in 0..d {
                if !self.inst.is_allowed(sp.0[1], tt) {
                    continue;
                }
                let mut best = Cost::INFINITY;
                let mut arg = 0;
                for (j, &base) in internal.iter().enumerate() {
                    if base.is_infinite() {
                        continue;
                    }
                    let [a, bt, bb, bc] = child.unindex(j);
                    let total = base
                        + ec(enter, s, a)
                        + ec(back_t, bt, s)
                        + ec(back_c, bc, s)
                        + ec(break_exit, bb, tt);
                    if total < best {
                        best = total;
                        arg = j;
                    }
                }
                best_st[s * d + tt] = best + ec(exit, s, tt);
                choice[s * d + tt] = arg as u32;
            }
        }
        let mut t = DpTable::filled(d, Cost::INFINITY);
        for i in 0..t.values.len() {
            let x = t.unindex(i);
            t.values[i] = best_st[x[0] * d + x[1]];
        }
        self.mask(sp, &mut t);
        (t, choice)
    }
}

/// Computes every node's table. Tables of children are kept, which the solver
/// itself does not need; this is for inspection and testing.
pub fn dp_tables(instance: &PcspInstance, decomp: &Decomposition) -> Result<Vec<DpTable>, SolveError> {
    let mut all = Vec::with_capacity(decomp.nodes().len());
    run(instance, decomp, |_, t| all.push(t.clone()))?;
    Ok(all)
}

/// Runs the bottom-up pass, handing each finished table to `visit`, and
/// returns the root table plus the choice records.
fn run(
    instance: &PcspInstance,
    decomp: &Decomposition,
    mut visit: impl FnMut(NodeId, &DpTable),
) -> Result<(DpTable, Vec<Choice>), SolveError> {
    if *instance.graph() != decomp.cfg().graph() {
        return Err(SolveError::InstanceMismatch);
    }
    let ctx = Ctx { inst: instance, d: instance.domain() };
    let mut stack: Vec<DpTable> = Vec::new();
    let mut choices = Vec::with_capacity(decomp.nodes().len());
    for (id, node) in decomp.nodes().iter().enumerate() {
        let sp = &node.specials;
        let (table, choice) = match &node.op {
            Op::AtomicEps { edge } => (ctx.atomic(sp, *edge, 1), Choice::None),
            Op::AtomicBreak { edge } => (ctx.atomic(sp, *edge, 2), Choice::None),
            Op::AtomicContinue { edge } => (ctx.atomic(sp, *edge, 3), Choice::None),
            Op::Series { merged, .. } => {
                let right = stack.pop().expect("post-order");
                let left = stack.pop().expect("post-order");
                let (t, c) = ctx.series(sp, *merged, &left, &right);
                (t, Choice::Series(c))
            }
            Op::Parallel { .. } => {
                let right = stack.pop().expect("post-order");
                let left = stack.pop().expect("post-order");
                (ctx.parallel(decomp, id, &left, &right), Choice::None)
            }
            Op::Loop { child, new_edges } => {
                let inner = stack.pop().expect("post-order");
                let (t, c) = ctx.looped(sp, &decomp.node(*child).specials, *new_edges, &inner);
                (t, Choice::Loop(c))
            }
        };
        visit(id, &table);
        stack.push(table);
        choices.push(choice);
    }
    let root = stack.pop().expect("decomposition has a root");
    debug_assert!(stack.is_empty());
    Ok((root, choices))
}

/// Minimum-cost assignment by dynamic programming over `decomp`, whose
/// control-flow graph must be the instance's graph.
///
/// ```
/// use spl_pcsp::lang::parse_program;
/// use spl_pcsp::solver::{solve, Cost, PcspInstance};
/// use spl_pcsp::spl::decompose;
///
/// let d = decompose(&parse_program("while p do x := x - 1 od").unwrap());
/// let mut inst = PcspInstance::from_edge_fn(d.cfg().graph(), 2, |_, a, b| Cost::finite((a != b) as u64)).unwrap();
/// inst.set_allowed(d.cfg().entry, &[0]).unwrap();
/// inst.set_allowed(d.cfg().exit, &[1]).unwrap();
/// let sol = solve(&inst, &d).unwrap();
/// assert_eq!(sol.min_cost, Cost::finite(1));
/// ```
pub fn solve(instance: &PcspInstance, decomp: &Decomposition) -> Result<Solution, SolveError> {
    let (root_table, choices) = run(instance, decomp, |_, _| {})?;
    let ctx = Ctx { inst: instance, d: instance.domain() };
    let root = decomp.root();
    let rsp = decomp.node(root).specials;

    let mut best = Cost::INFINITY;
    let mut arg = 0;
    for (i, &v) in root_table.values.iter().enumerate() {
        if v.is_infinite() {
            continue;
        }
        let x = root_table.unindex(i);
        let total = v + (0..4).map(|k| ctx.vc(rsp.0[k], x[k])).sum();
        if total < best {
            best = total;
            arg = i;
        }
    }
    if best.is_infinite() {
        return Ok(Solution { min_cost: best, assignment: None });
    }

    let mut xs: Vec<[usize; 4]> = vec![[0; 4]; decomp.nodes().len()];
    xs[root] = root_table.unindex(arg);
    let d = instance.domain();
    let mut values = vec![usize::MAX; instance.vertex_count()];
    for id in (0..decomp.nodes().len()).rev() {
        let node = decomp.node(id);
        let x = xs[id];
        for k in 0..4 {
            values[node.specials.0[k]] = x[k];
        }
        match (&node.op, &choices[id]) {
            (Op::Series { left, right, .. }, Choice::Series(c)) => {
                let m = c[root_table.index(x)] as usize;
                xs[*left] = [x[0], m, x[2], x[3]];
                xs[*right] = [m, x[1], x[2], x[3]];
            }
            (Op::Parallel { left, right, .. }, _) => {
                xs[*left] = x;
                xs[*right] = x;
            }
            (Op::Loop { child, .. }, Choice::Loop(c)) => {
                xs[*child] = root_table.unindex(c[x[0] * d + x[1]] as usize);
            }
            _ => {}
        }
    }
    debug_assert!(values.iter().all(|&b| b < d), "every vertex is special somewhere");
    Ok(Solution { min_cost: best, assignment: Some(Assignment(values)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;
    use crate::solver::{evaluate, oracle_solve};
    use crate::spl::decompose;

    const EUCLID: &str =
        "while x >= 1 do if x >= y then x := x - y; break else y := y - x; continue fi od";

    fn mismatch(d: &Decomposition, k: usize) -> PcspInstance {
        PcspInstance::from_edge_fn(d.cfg().graph(), k, |_, a, b| Cost::finite((a != b) as u64)).unwrap()
    }

    #[test]
    fn single_statement_constant_assignment() {
        let d = decompose(&parse_program("x := 1").unwrap());
        let sol = solve(&mismatch(&d, 2), &d).unwrap();
        assert_eq!(sol.min_cost, Cost::ZERO);
        assert_eq!(sol.assignment.unwrap().0, vec![0; 4]);
    }

    #[test]
    fn euclid_pinned_matches_oracle() {
        let d = decompose(&parse_program(EUCLID).unwrap());
        let mut inst = mismatch(&d, 2);
        assert_eq!(solve(&inst, &d).unwrap().min_cost, Cost::ZERO);
        inst.set_allowed(d.cfg().entry, &[0]).unwrap();
        inst.set_allowed(d.cfg().exit, &[1]).unwrap();
        let sol = solve(&inst, &d).unwrap();
        assert_eq!(sol.min_cost, oracle_solve(&inst).unwrap().min_cost);
        assert_eq!(evaluate(&inst, sol.assignment.as_ref().unwrap()).unwrap(), sol.min_cost);
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let a = decompose(&parse_program("x := 1").unwrap());
        let b = decompose(&parse_program("x := 1; y := 2").unwrap());
        assert_eq!(solve(&mismatch(&a, 2), &b), Err(SolveError::InstanceMismatch));
    }

    #[test]
    fn infeasible_has_no_assignment() {
        let d = decompose(&parse_program("x := 1").unwrap());
        let inst = PcspInstance::from_edge_fn(d.cfg().graph(), 2, |_, _, _| Cost::INFINITY).unwrap();
        let sol = solve(&inst, &d).unwrap();
        assert_eq!(sol, Solution { min_cost: Cost::INFINITY, assignment: None });
    }

    #[test]
    fn tables_follow_post_order() {
        let d = decompose(&parse_program(EUCLID).unwrap());
        let tables = dp_tables(&mismatch(&d, 2), &d).unwrap();
        assert_eq!(tables.len(), d.nodes().len());
        // The atomic break edge S→B costs one exactly when S and B differ.
        let brk = d.nodes().iter().position(|n| matches!(n.op, Op::AtomicBreak { .. })).unwrap();
        assert_eq!(tables[brk].get([0, 0, 1, 0]), Cost::finite(1));
        assert_eq!(tables[brk].get([1, 0, 1, 0]), Cost::ZERO);
    }
}
