//! Command-line front end: ingestion, solvers, strategy replay, instance
//! generation, and benchmark reporting.
//!
//! Exit codes: 0 success, 2 validation error (bad input, illegal move), 3
//! solver size guard, 4 bound violation in `bench`, 5 strategy replays
//! legally but ends non-terminal.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use redblue::*;

#[derive(Parser)]
#[command(name = "redblue", version, about = "Red-blue pebble game toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a DAG instance and report a validated strategy.
    Solve(SolveArgs),
    /// Replay a strategy file against a DAG and report its cost and trace.
    Check(CheckArgs),
    /// Generate instance files.
    Gen(GenArgs),
    /// Rewrite a word-granular DAG into its cache-line DAG (packed layout).
    Transform(TransformArgs),
    /// Export a DAG or its conflict graph as JSON or DOT.
    Export(ExportArgs),
    /// Run the approximation benchmark over an instance corpus.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Standard,
    Fused,
}

impl From<ModelArg> for CostModel {
    fn from(value: ModelArg) -> CostModel {
        match value {
            ModelArg::Standard => CostModel::Standard,
            ModelArg::Fused => CostModel::Fused,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Christofides,
    Multilevel,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    /// Input DAG: edge-list file, or Matrix Market if the header says so.
    #[arg(long)]
    input: PathBuf,
    /// Fast-memory capacity M.
    #[arg(long, default_value_t = 2)]
    memory: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Standard)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = SolverArg::Exact)]
    solver: SolverArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// Strategy JSON produced by `solve --format json` (field `strategy`).
    #[arg(long)]
    strategy: PathBuf,
    #[arg(long, default_value_t = 2)]
    memory: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// Random one-level bipartite DAG.
    Random {
        #[arg(long)]
        sources: usize,
        #[arg(long)]
        sinks: usize,
        /// Probability of each possible edge.
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hamiltonian-path reduction gadget DAG plus a `.json` sidecar.
    Gadget {
        /// Vertices of the source graph.
        #[arg(long)]
        nodes: usize,
        /// Source-graph edges as `a-b,c-d`; omit for the edgeless graph.
        #[arg(long, default_value = "")]
        edges: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    input: PathBuf,
    /// Cache-line size B.
    #[arg(long)]
    line_size: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    what: ExportWhat,
    /// Cost model for conflict-graph exports.
    #[arg(long, value_enum, default_value_t = ModelArg::Standard)]
    model: ModelArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportWhat {
    DagJson,
    DagDot,
    ConflictJson,
    ConflictDot,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files (`.el`, `.txt`, `.mtx`).
    #[arg(long)]
    corpus: PathBuf,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 4)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check(args) => cmd_check(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Export(args) => cmd_export(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SizeGuard { .. } => 3,
        Error::NonTerminal { .. } => 5,
        _ => 2,
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::BadParameters {
        reason: format!("cannot read '{}': {e}", path.display()),
    })
}

fn read_dag(path: &Path) -> Result<Dag> {
    let text = read_file(path)?;
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(BufReader::new(text.as_bytes()))
    } else {
        parse_edge_list(BufReader::new(text.as_bytes()))
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    if args.memory < 2 {
        return Err(Error::BadParameters {
            reason: "--memory must be at least 2".into(),
        });
    }
    let model: CostModel = args.model.into();
    let dag = read_dag(&args.input)?;
    let (strategy, solver_name, oracle) = match args.solver {
        SolverArg::Exact => solve_exact(&dag, args.memory, model)?,
        SolverArg::Christofides => {
            if args.memory != 2 {
                return Err(Error::BadParameters {
                    reason: "christofides models a two-word cache; use --memory 2".into(),
                });
            }
            if !dag.is_one_level() {
                return Err(Error::NotBipartite {
                    reason: "input has internal nodes; use --solver multilevel or --solver exact"
                        .into(),
                });
            }
            let cg = ConflictGraph::new(&dag, model)?;
            let path = christofides_path(&cg)?;
            let strategy = path_to_strategy(&cg, &path)?;
            let oracle = if cg.vertex_count() <= exact::HELD_KARP_MAX_EDGES {
                Some(held_karp_path(&cg)?.cost() + 3)
            } else {
                None
            };
            (strategy, "christofides", oracle)
        }
        SolverArg::Multilevel => {
            if args.memory != 2 {
                return Err(Error::BadParameters {
                    reason: "the level-by-level pipeline models a two-word cache; use --memory 2"
                        .into(),
                });
            }
            let leveled = compute_levels(&dag)?;
            let solution = multi_level_solve(&leveled, model, PathSolver::Christofides)?;
            // The honest oracle is the global optimum, which only the
            // state-space search provides on multi-level inputs.
            let oracle = if dag.node_count() <= exact::STATE_SPACE_MAX_NODES
                && dag.edge_count() <= exact::STATE_SPACE_MAX_EDGES
            {
                Some(state_space_opt(&dag, 2, model)?.cost)
            } else {
                None
            };
            (solution.strategy, "multilevel", oracle)
        }
    };

    // Never trust a solver's own cost accounting.
    let report = simulate(&dag, &strategy, args.memory)?;
    let ratio = oracle.map(|opt| {
        if opt == 0 {
            1.0
        } else {
            report.cost as f64 / opt as f64
        }
    });

    let strategy_json: serde_json::Value =
        serde_json::from_str(&strategy_to_json(&dag, &strategy))?;
    let trace_json: serde_json::Value = serde_json::from_str(&trace_to_json(&dag, &report.trace))?;
    let json = serde_json::json!({
        "input": args.input.display().to_string(),
        "solver": solver_name,
        "model": model.as_str(),
        "memory": args.memory,
        "cost": report.cost,
        "moves": strategy.moves.len(),
        "instructions": report.trace.instructions.len(),
        "oracle_cost": oracle,
        "ratio_vs_oracle": ratio,
        "strategy": strategy_json,
        "trace": trace_json,
    });

    let content = match args.format {
        FormatArg::Json => format!("{json}\n"),
        FormatArg::Text => {
            let mut s = format!(
                "solver {solver_name} ({} model, M={}): cost {} with {} moves\n",
                model.as_str(),
                args.memory,
                report.cost,
                strategy.moves.len()
            );
            match oracle {
                Some(opt) => s.push_str(&format!(
                    "oracle optimum {opt}, ratio {:.4}\n",
                    ratio.unwrap_or(1.0)
                )),
                None => s.push_str("oracle optimum not computed (instance above guard)\n"),
            }
            s
        }
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn solve_exact(
    dag: &Dag,
    memory: usize,
    model: CostModel,
) -> Result<(Strategy, &'static str, Option<u64>)> {
    // Two-word one-level instances route through Held-Karp, which reaches
    // much larger edge counts than the state-space search.
    if memory == 2 && dag.is_one_level() && dag.edge_count() >= 1 {
        if dag.edge_count() <= exact::HELD_KARP_MAX_EDGES {
            let cg = ConflictGraph::new(dag, model)?;
            let path = held_karp_path(&cg)?;
            let strategy = path_to_strategy(&cg, &path)?;
            let opt = path.cost() + 3;
            return Ok((strategy, "exact (held-karp)", Some(opt)));
        }
        return Err(Error::SizeGuard {
            what: "solve --solver exact",
            actual: dag.edge_count(),
            limit: exact::HELD_KARP_MAX_EDGES,
        });
    }
    let optimum = state_space_opt(dag, memory, model)?;
    let cost = optimum.cost;
    Ok((optimum.strategy, "exact (state space)", Some(cost)))
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode> {
    if args.memory < 2 {
        return Err(Error::BadParameters {
            reason: "--memory must be at least 2".into(),
        });
    }
    let dag = read_dag(&args.input)?;
    let text = read_file(&args.strategy)?;
    let strategy = strategy_from_json(&dag, &text)?;
    let report = simulate(&dag, &strategy, args.memory)?;
    match args.format {
        FormatArg::Json => {
            let trace: serde_json::Value =
                serde_json::from_str(&trace_to_json(&dag, &report.trace))?;
            println!(
                "{}",
                serde_json::json!({"cost": report.cost, "trace": trace})
            );
        }
        FormatArg::Text => {
            println!(
                "strategy is valid and terminal: cost {}, {} instructions",
                report.cost,
                report.trace.instructions.len()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_graph_edges(spec: &str) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let mut ends = part.trim().split('-');
        let (a, b) = match (ends.next(), ends.next(), ends.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::BadParameters {
                    reason: format!("bad edge '{part}', expected 'a-b'"),
                })
            }
        };
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::BadParameters {
                reason: format!("bad vertex '{s}' in edge '{part}'"),
            })
        };
        edges.push((parse(a)?, parse(b)?));
    }
    Ok(edges)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    match args.kind {
        GenKind::Random {
            sources,
            sinks,
            density,
            seed,
            out,
        } => {
            let mut rng = SplitMix64::new(seed);
            let dag = instances::random_bipartite_density(&mut rng, sources, sinks, density)?;
            fs::write(&out, write_edge_list(&dag))?;
            eprintln!(
                "wrote {} ({} nodes, {} edges, seed {seed})",
                out.display(),
                dag.node_count(),
                dag.edge_count()
            );
        }
        GenKind::Gadget { nodes, edges, out } => {
            let graph = SimpleGraph::new(nodes, parse_graph_edges(&edges)?)?;
            let instance = build_gadget_instance(&graph)?;
            fs::write(&out, write_edge_list(&instance.dag))?;
            let sidecar = out.with_extension(format!(
                "{}json",
                out.extension()
                    .map(|e| format!("{}.", e.to_string_lossy()))
                    .unwrap_or_default()
            ));
            fs::write(&sidecar, instance.sidecar_json())?;
            eprintln!(
                "wrote {} ({} edges) and {}",
                out.display(),
                instance.dag.edge_count(),
                sidecar.display()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(args: TransformArgs) -> Result<ExitCode> {
    let dag = read_dag(&args.input)?;
    let layout = MemoryLayout::packed(&dag, args.line_size)?;
    let lined = transform_cache_lines(&dag, &layout)?;
    emit(&args.out, &write_edge_list(&lined))?;
    eprintln!(
        "{} nodes over {} cache lines of {} words",
        dag.node_count(),
        lined.node_count(),
        args.line_size
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(args: ExportArgs) -> Result<ExitCode> {
    let dag = read_dag(&args.input)?;
    let content = match args.what {
        ExportWhat::DagJson => format!("{}\n", dag.to_json()),
        ExportWhat::DagDot => dag.to_dot(),
        ExportWhat::ConflictJson => {
            let cg = ConflictGraph::new(&dag, args.model.into())?;
            format!("{}\n", cg.to_json())
        }
        ExportWhat::ConflictDot => {
            let cg = ConflictGraph::new(&dag, args.model.into())?;
            cg.to_dot()
        }
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

struct BenchRow {
    instance: String,
    report: RatioReport,
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.corpus)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("el") | Some("txt") | Some("mtx")
            )
        })
        .collect();
    paths.sort();

    // Instances run in parallel; results land in slots indexed by instance,
    // so the report order is the sorted path order, not completion order.
    let jobs = args.jobs.max(1);
    let slots: Vec<Option<std::result::Result<Vec<BenchRow>, String>>> = {
        let results = std::sync::Mutex::new((0..paths.len()).map(|_| None).collect::<Vec<_>>());
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(paths.len().max(1)) {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if idx >= paths.len() {
                        break;
                    }
                    let outcome = bench_instance(&paths[idx]);
                    results.lock().expect("bench results lock")[idx] = Some(outcome);
                });
            }
        });
        results.into_inner().expect("bench results lock")
    };

    let mut csv = String::from("instance,model,m,opt,approx,ratio,bound,within_bound\n");
    let mut rows = 0usize;
    let mut skipped = 0usize;
    let mut violations = 0usize;
    let mut max_ratio = [0f64; 2];
    for (path, slot) in paths.iter().zip(slots) {
        match slot.expect("all slots filled") {
            Ok(instance_rows) => {
                for row in instance_rows {
                    let r = &row.report;
                    csv.push_str(&format!(
                        "{},{},{},{},{},{:.6},{:.6},{}\n",
                        row.instance,
                        r.model,
                        r.m,
                        r.opt,
                        r.approx,
                        r.ratio,
                        r.bound,
                        r.within_bound
                    ));
                    let model_idx = if r.model == "standard" { 0 } else { 1 };
                    max_ratio[model_idx] = max_ratio[model_idx].max(r.ratio);
                    if !r.within_bound {
                        violations += 1;
                    }
                    rows += 1;
                }
            }
            Err(reason) => {
                eprintln!("warning: skipping {}: {reason}", path.display());
                skipped += 1;
            }
        }
    }

    if let Some(out) = &args.out {
        fs::write(out, &csv)?;
    } else {
        print!("{csv}");
    }
    println!(
        "bench: {rows} rows, skipped {skipped}, max ratio standard {:.4} (bound 2.625), fused {:.4} (bound 2.0), violations {violations}",
        max_ratio[0], max_ratio[1]
    );
    if rows == 0 {
        eprintln!("error: corpus produced no usable instances");
        return Ok(ExitCode::from(2));
    }
    if violations > 0 {
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_instance(path: &Path) -> std::result::Result<Vec<BenchRow>, String> {
    let dag = read_dag(path).map_err(|e| e.to_string())?;
    if !dag.is_one_level() {
        return Err("not a one-level bipartite DAG".into());
    }
    if dag.edge_count() == 0 {
        return Err("no edges".into());
    }
    if dag.edge_count() > exact::HELD_KARP_MAX_EDGES {
        return Err(format!(
            "too many edges for the oracle ({} > {})",
            dag.edge_count(),
            exact::HELD_KARP_MAX_EDGES
        ));
    }
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut rows = Vec::new();
    for model in [CostModel::Standard, CostModel::Fused] {
        let cg = ConflictGraph::new(&dag, model).map_err(|e| e.to_string())?;
        let approx = christofides_path(&cg).map_err(|e| e.to_string())?;
        let opt = held_karp_path(&cg).map_err(|e| e.to_string())?;
        rows.push(BenchRow {
            instance: name.clone(),
            report: RatioReport::new(model, cg.vertex_count(), opt.cost(), approx.cost()),
        });
    }
    Ok(rows)
}
