use super::{Assignment, Cost, PcspInstance, Solution, SolveError};

/// Default cap on the number of complete assignments the oracle may face.
pub const DEFAULT_ORACLE_BUDGET: u128 = 1 << 24;

/// Exact minimum by exhaustive search, independent of any decomposition.
/// Works on any graph. Ties go to the lexicographically smallest assignment.
pub fn oracle_solve(instance: &PcspInstance) -> Result<Solution, SolveError> {
    oracle_solve_with_budget(instance, DEFAULT_ORACLE_BUDGET)
}

/// As [`oracle_solve`], failing when the product of the allowed-set sizes
/// exceeds `budget`.
pub fn oracle_solve_with_budget(instance: &PcspInstance, budget: u128) -> Result<Solution, SolveError> {
    let n = instance.vertex_count();
    let choices: Vec<Vec<usize>> = (0..n).map(|v| instance.allowed_values(v)).collect();
    let mut required: u128 = 1;
    for c in &choices {
        required = required.saturating_mul(c.len() as u128);
    }
    if required > budget {
        return Err(SolveError::BudgetExceeded { required, budget });
    }
    if n == 0 {
        return Ok(Solution { min_cost: Cost::ZERO, assignment: Some(Assignment(Vec::new())) });
    }

    // Each edge is charged when its later endpoint is fixed.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(s, t)) in instance.graph().edges.iter().enumerate() {
        closing[s.max(t)].push(e);
    }

    // Depth-first search over vertices in id order. `partial[v]` is the cost
    // of everything charged before `v` is fixed.
    let mut pos = vec![0usize; n];
    let mut values = vec![0usize; n];
    let mut partial = vec![Cost::ZERO; n + 1];
    let mut best = Cost::INFINITY;
    let mut best_values: Option<Vec<usize>> = None;
    let mut v = 0usize;
    loop {
        if pos[v] == choices[v].len() {
            pos[v] = 0;
            if v == 0 {
                break;
            }
            v -= 1;
            pos[v] += 1;
            continue;
        }
        let b = choices[v][pos[v]];
        values[v] = b;
        let mut cost = partial[v] + instance.vertex_cost(v, b);
        for &e in &closing[v] {
            let (s, t) = instance.graph().edges[e];
            cost += instance.edge_cost(e, values[s], values[t]);
        }
        if cost.is_infinite() || cost >= best {
            pos[v] += 1;
            continue;
        }
        if v + 1 == n {
            best = cost;
            best_values = Some(values.clone());
            pos[v] += 1;
            continue;
        }
        partial[v + 1] = cost;
        v += 1;
    }
    Ok(Solution { min_cost: best, assignment: best_values.map(Assignment) })
}
