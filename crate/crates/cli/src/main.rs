use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use spl_pcsp::bench::{mean_solve_ns, run_bench, write_csv, BenchConfig, BenchError};
use spl_pcsp::gen::{gen_random_program, GenConfig};
use spl_pcsp::instances::{
    ad_hoc_assignment, build_bank_selection, build_graph_coloring, build_lospre, build_regalloc, BankSpec, GraphFile,
    LospreSpec, RegAllocSpec,
};
use spl_pcsp::lang::{parse_program, pretty_print, tree_to_dot, ParseTree};
use spl_pcsp::solver::{evaluate, oracle_solve, solve, InstanceFile, Solution, VertexRef};
use spl_pcsp::spl::{decompose, Decomposition};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Exact cost-minimizing assignments over control-flow graphs of structured programs.
#[derive(Parser)]
#[command(name = "spl-pcsp", version)]
struct Cli {
    /// More logging on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and print it canonically, as JSON, or as DOT.
    Parse {
        file: PathBuf,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        #[arg(long)]
        dot: bool,
    },
    /// Build the control-flow graph and its decomposition.
    Cfg {
        file: PathBuf,
        #[arg(long, conflicts_with_all = ["dot", "decomposition"])]
        json: bool,
        #[arg(long, conflicts_with = "decomposition")]
        dot: bool,
        /// Print the operation tree as nested JSON.
        #[arg(long)]
        decomposition: bool,
    },
    /// Solve an instance file over the program's control-flow graph.
    Solve {
        file: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        /// Also run the exhaustive oracle and fail on any disagreement.
        #[arg(long)]
        oracle_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal placement of bank selection instructions.
    Bank {
        file: PathBuf,
        #[arg(long)]
        banks: usize,
        /// Vertex that needs a bank, as VERTEX=BANK.
        #[arg(long, value_parser = parse_preassign)]
        preassign: Vec<(String, usize)>,
        #[arg(long, default_value_t = 1)]
        c0: u64,
        #[arg(long, default_value_t = 1)]
        c1: u64,
        /// Taken branch edge as SRC,DST; replaces the default set.
        #[arg(long, value_parser = parse_edge)]
        taken: Vec<(usize, usize)>,
        /// Let the entry vertex start with any bank instead of an unknown one.
        #[arg(long)]
        entry_any: bool,
    },
    /// Lifetime-optimal partial redundancy elimination for one expression.
    Lospre {
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Register allocation with lifetimes given as vertex sets.
    Regalloc {
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Minimum-conflict coloring of an arbitrary graph by exhaustive search.
    Coloring {
        graph: PathBuf,
        #[arg(long)]
        colors: usize,
    },
    /// Print a random closed program.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        size: usize,
    },
    /// Time the solver on random programs and write a CSV.
    Bench {
        /// Comma-separated statement counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        domain: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        with_oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_preassign(s: &str) -> Result<(String, usize), String> {
    let (v, b) = s.split_once('=').ok_or("expected VERTEX=BANK")?;
    let bank = b.trim().parse().map_err(|_| format!("bad bank `{b}`"))?;
    Ok((v.trim().to_string(), bank))
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected SRC,DST")?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad vertex `{x}`"));
    Ok((num(a)?, num(b)?))
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_program(path: &Path) -> Result<ParseTree, String> {
    parse_program(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes data to stdout; a closed pipe is not an error.
fn write_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(value: &Value) {
    write_stdout(&(serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n"));
}

fn status(solution: &Solution) -> ExitCode {
    if solution.is_feasible() {
        ExitCode::SUCCESS
    } else {
        eprintln!("infeasible: every assignment has infinite cost");
        ExitCode::from(EXIT_INFEASIBLE)
    }
}

fn vertex(decomp: &Decomposition, name: &str) -> Result<usize, String> {
    let cfg = decomp.cfg();
    VertexRef::Name(name.to_string()).resolve(cfg.vertex_count, Some(&cfg.specials())).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Parse { file, json, dot } => {
            let tree = load_program(&file)?;
            if json {
                emit(&serde_json::to_value(&tree).map_err(|e| e.to_string())?);
            } else if dot {
                write_stdout(&tree_to_dot(&tree));
            } else {
                write_stdout(&pretty_print(&tree));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cfg { file, json, dot, decomposition } => {
            let decomp = decompose(&load_program(&file)?);
            let cfg = decomp.cfg();
            if json {
                emit(&cfg.to_json(None));
            } else if dot {
                write_stdout(&cfg.to_dot());
            } else if decomposition {
                emit(&decomp.to_json());
            } else {
                write_stdout(&format!(
                    "decomposition: {}\nvertices: {}\nedges: {}\nentry: {}\nexit: {}\nclosed: {}\n",
                    decomp.to_term(),
                    cfg.vertex_count,
                    cfg.edges.len(),
                    cfg.entry,
                    cfg.exit,
                    decomp.closedness().is_closed
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { file, instance, oracle_check, out } => {
            let decomp = decompose(&load_program(&file)?);
            let spec: InstanceFile = load_json(&instance)?;
            let cfg = decomp.cfg();
            let inst = spec.to_instance(cfg.graph(), Some(&cfg.specials())).map_err(|e| e.to_string())?;
            let solution = solve(&inst, &decomp).map_err(|e| e.to_string())?;
            if let Some(a) = &solution.assignment {
                let check = evaluate(&inst, a).map_err(|e| e.to_string())?;
                if check != solution.min_cost {
                    eprintln!("internal error: assignment evaluates to {check}, reported {}", solution.min_cost);
                    return Ok(ExitCode::from(EXIT_MISMATCH));
                }
            }
            if oracle_check {
                let oracle = oracle_solve(&inst).map_err(|e| e.to_string())?;
                if oracle.min_cost != solution.min_cost {
                    eprintln!("oracle mismatch: solver {}, oracle {}", solution.min_cost, oracle.min_cost);
                    return Ok(ExitCode::from(EXIT_MISMATCH));
                }
                eprintln!("oracle agrees: {}", oracle.min_cost);
            }
            let text = serde_json::to_string_pretty(&solution.to_json()).expect("JSON values serialize");
            match out {
                Some(path) => fs::write(&path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?,
                None => write_stdout(&(text + "\n")),
            }
            Ok(status(&solution))
        }
        Command::Bank { file, banks, preassign, c0, c1, taken, entry_any } => {
            let decomp = decompose(&load_program(&file)?);
            let mut spec = BankSpec::new(banks);
            for (v, b) in &preassign {
                spec.preassigned.insert(vertex(&decomp, v)?, *b);
            }
            spec.c0 = c0.into();
            spec.c1 = c1.into();
            spec.entry_unknown = !entry_any;
            if !taken.is_empty() {
                spec.taken_edges = Some(taken.into_iter().collect::<BTreeSet<_>>());
            }
            let inst = build_bank_selection(decomp.cfg(), &spec).map_err(|e| e.to_string())?;
            let solution = solve(&inst, &decomp).map_err(|e| e.to_string())?;
            let ad_hoc = evaluate(&inst, &ad_hoc_assignment(decomp.cfg(), &spec)).map_err(|e| e.to_string())?;
            let mut out = solution.to_json();
            out["unknown"] = json!(spec.unknown());
            out["ad_hoc_cost"] = json!(ad_hoc);
            emit(&out);
            Ok(status(&solution))
        }
        Command::Lospre { file, spec } => {
            let decomp = decompose(&load_program(&file)?);
            let spec: LospreSpec = load_json(&spec)?;
            let inst = build_lospre(decomp.cfg(), &spec).map_err(|e| e.to_string())?;
            let solution = solve(&inst, &decomp).map_err(|e| e.to_string())?;
            let mut out = solution.to_json();
            if let Some(a) = &solution.assignment {
                let life: Vec<usize> = (0..a.0.len()).filter(|&v| a.get(v) == 1).collect();
                out["life_set"] = json!(life);
            }
            emit(&out);
            Ok(status(&solution))
        }
        Command::Regalloc { file, spec } => {
            let decomp = decompose(&load_program(&file)?);
            let spec: RegAllocSpec = load_json(&spec)?;
            let ra = build_regalloc(decomp.cfg(), &spec).map_err(|e| e.to_string())?;
            let solution = solve(&ra.instance, &decomp).map_err(|e| e.to_string())?;
            let mut out = solution.to_json();
            if let Some(a) = &solution.assignment {
                // Vertices in ascending order; only those with live variables.
                let locations: serde_json::Map<String, Value> = ra
                    .decode(a)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, m)| !m.is_empty())
                    .map(|(v, m)| {
                        let m: BTreeMap<String, Value> =
                            m.into_iter().map(|(x, r)| (x, r.map_or(json!("memory"), |r| json!(r)))).collect();
                        (v.to_string(), json!(m))
                    })
                    .collect();
                out["locations"] = Value::Object(locations);
            }
            emit(&out);
            Ok(status(&solution))
        }
        Command::Coloring { graph, colors } => {
            let file: GraphFile = load_json(&graph)?;
            let g = file.to_digraph().map_err(|e| e.to_string())?;
            let inst = build_graph_coloring(g, colors).map_err(|e| e.to_string())?;
            let solution = oracle_solve(&inst).map_err(|e| e.to_string())?;
            let names = file.names();
            let coloring: serde_json::Map<String, Value> = match &solution.assignment {
                Some(a) => names.iter().enumerate().map(|(v, n)| (n.clone(), json!(a.get(v)))).collect(),
                None => serde_json::Map::new(),
            };
            emit(&json!({ "min_cost": solution.min_cost, "coloring": coloring }));
            Ok(status(&solution))
        }
        Command::Gen { seed, size } => {
            if size == 0 {
                return Err("size must be at least 1".into());
            }
            write_stdout(&pretty_print(&gen_random_program(&GenConfig::new(seed, size))));
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { sizes, domain, trials, csv, with_oracle, seed } => {
            if domain == 0 || trials == 0 || sizes.contains(&0) {
                return Err("sizes, domain and trials must be positive".into());
            }
            let mut config = BenchConfig::new(sizes, domain, trials);
            config.with_oracle = with_oracle;
            config.seed = seed;
            let records = match run_bench(&config) {
                Ok(r) => r,
                Err(e @ BenchError::Mismatch { .. }) => {
                    eprintln!("oracle mismatch: {e}");
                    return Ok(ExitCode::from(EXIT_MISMATCH));
                }
                Err(e) => return Err(e.to_string()),
            };
            let file = fs::File::create(&csv).map_err(|e| format!("{}: {e}", csv.display()))?;
            write_csv(&records, file).map_err(|e| e.to_string())?;
            for (size, mean) in mean_solve_ns(&records) {
                eprintln!("size {size}: mean solve {mean:.0} ns");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
