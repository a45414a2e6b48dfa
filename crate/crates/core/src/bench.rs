//! Runtime measurement of the solver on random programs.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gen::{gen_random_program, random_instance, GenConfig};
use crate::solver::{oracle_solve, solve, Cost, SolveError};
use crate::spl::decompose;

pub const CSV_HEADER: [&str; 8] = ["size", "id", "vertices", "edges", "domain", "solve_ns", "oracle_ns", "cost"];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub domain: usize,
    pub trials: usize,
    pub with_oracle: bool,
    pub seed: u64,
    /// Each solve is repeated until this much time has passed; the record
    /// holds the mean.
    pub min_time: Duration,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>, domain: usize, trials: usize) -> BenchConfig {
        BenchConfig { sizes, domain, trials, with_oracle: false, seed: 0, min_time: Duration::from_millis(2) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub size: usize,
    pub id: usize,
    pub vertices: usize,
    pub edges: usize,
    pub domain: usize,
    pub solve_ns: u64,
    /// Absent when the oracle was not requested or the instance is too large
    /// for it.
    pub oracle_ns: Option<u64>,
    pub cost: Cost,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("size {size}, instance {id}: solver found {solver}, oracle {oracle}")]
    Mismatch { size: usize, id: usize, solver: Cost, oracle: Cost },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Seed of trial `id` at `size`, so that each trial is reproducible on its own.
pub fn trial_seed(seed: u64, size: usize, id: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((size as u64) << 20) ^ id as u64
}

/// Runs `trials` instances per size. Only the solver call is timed.
/// Records come back sorted by `(size, id)`.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    let mut records = Vec::with_capacity(config.sizes.len() * config.trials);
    for &size in &config.sizes {
        for id in 0..config.trials {
            let seed = trial_seed(config.seed, size, id);
            let decomp = decompose(&gen_random_program(&GenConfig::new(seed, size)));
            let inst = random_instance(decomp.cfg().graph(), config.domain, &mut ChaCha8Rng::seed_from_u64(seed));

            let solution = solve(&inst, &decomp)?;
            let mut reps = 0u64;
            let start = Instant::now();
            while reps < 3 || start.elapsed() < config.min_time {
                std::hint::black_box(solve(std::hint::black_box(&inst), &decomp)?);
                reps += 1;
            }
            let solve_ns = (start.elapsed().as_nanos() / reps as u128) as u64;

            let oracle_ns = if config.with_oracle {
                let start = Instant::now();
                match oracle_solve(&inst) {
                    Ok(o) => {
                        let elapsed = start.elapsed().as_nanos() as u64;
                        if o.min_cost != solution.min_cost {
                            return Err(BenchError::Mismatch { size, id, solver: solution.min_cost, oracle: o.min_cost });
                        }
                        Some(elapsed)
                    }
                    Err(SolveError::BudgetExceeded { .. }) => None,
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            log::debug!("size {size} id {id}: {solve_ns} ns");
            records.push(BenchRecord {
                size,
                id,
                vertices: inst.vertex_count(),
                edges: inst.edge_count(),
                domain: config.domain,
                solve_ns,
                oracle_ns,
                cost: solution.min_cost,
            });
        }
    }
    records.sort_by_key(|r| (r.size, r.id));
    Ok(records)
}

pub fn write_csv(records: &[BenchRecord], out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.size.to_string(),
            r.id.to_string(),
            r.vertices.to_string(),
            r.edges.to_string(),
            r.domain.to_string(),
            r.solve_ns.to_string(),
            r.oracle_ns.map(|n| n.to_string()).unwrap_or_default(),
            r.cost.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean solve time per size, in the order the sizes first appear.
pub fn mean_solve_ns(records: &[BenchRecord]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64, usize)> = Vec::new();
    for r in records {
        match out.iter_mut().find(|(s, _, _)| *s == r.size) {
            Some(entry) => {
                entry.1 += r.solve_ns as f64;
                entry.2 += 1;
            }
            None => out.push((r.size, r.solve_ns as f64, 1)),
        }
    }
    out.into_iter().map(|(s, total, n)| (s, total / n as f64)).collect()
}
