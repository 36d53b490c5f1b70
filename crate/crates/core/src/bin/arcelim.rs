//! `arcelim` command line: generate graphs, run traversals, check them against
//! the sequential references and produce speedup tables.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use arcelim::bench::{self, BenchRecord};
use arcelim::traversal::{self, compare_results, oracle_result, TraceObserver, TraversalResult};
use arcelim::{generators, Backend, ElimGraph, Graph, Kind, ParEngine};

#[derive(Parser)]
#[command(name = "arcelim", version, about = "Ordered parallel DFS/BFS by arc elimination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Path,
    Complete,
    Star,
    Gnm,
    Layered,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Dfs,
    Bfs,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Dfs => Kind::Dfs,
            KindArg::Bfs => Kind::Bfs,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Simulated,
    Threaded,
}

impl From<ModeArg> for Backend {
    fn from(m: ModeArg) -> Backend {
        match m {
            ModeArg::Simulated => Backend::Simulated,
            ModeArg::Threaded => Backend::Threaded,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph in edge-list format.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Vertex count (path, complete, star, gnm).
        #[arg(long)]
        n: Option<usize>,
        /// Arc count (gnm).
        #[arg(long)]
        m: Option<usize>,
        /// Layer width (layered).
        #[arg(long)]
        width: Option<usize>,
        /// Layer count (layered).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one traversal and print the result followed by its cost.
    Run {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Number given to the start vertex.
        #[arg(long, default_value_t = 0)]
        a0: usize,
        #[arg(long, env = "ARCELIM_PROCS", default_value_t = 1)]
        procs: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Simulated)]
        mode: ModeArg,
        /// Print `visit v number=k level=l` lines to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Compare traversals against the sequential references.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [KindArg::Dfs, KindArg::Bfs])]
        kinds: Vec<KindArg>,
        /// Comma-separated start vertices, or `all`.
        #[arg(long, default_value = "0")]
        starts: String,
        #[arg(long, env = "ARCELIM_PROCS", default_value_t = 1)]
        procs: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Simulated)]
        mode: ModeArg,
        /// Check this result dump instead of running a traversal; uses the
        /// first kind and first start.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Produce a CSV speedup table.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated sizes: n for path/complete/star/gnm, width for layered.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8])]
        procs: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [KindArg::Dfs, KindArg::Bfs])]
        kinds: Vec<KindArg>,
        #[arg(long, value_enum, default_value_t = ModeArg::Simulated)]
        mode: ModeArg,
        /// gnm: arcs per vertex, m = degree * n.
        #[arg(long, default_value_t = 8)]
        degree: usize,
        /// layered: number of layers.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Output file; stdout if omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    Mismatch,
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Input(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen {
            family,
            n,
            m,
            width,
            depth,
            seed,
            out,
        } => gen(family, n, m, width, depth, seed, out.as_deref()),
        Command::Run {
            kind,
            input,
            start,
            a0,
            procs,
            mode,
            trace,
        } => run(kind.into(), &input, start, a0, procs, mode.into(), trace),
        Command::Verify {
            input,
            kinds,
            starts,
            procs,
            mode,
            against,
        } => verify(&input, &kinds, &starts, procs, mode.into(), against.as_deref()),
        Command::Bench {
            family,
            sizes,
            procs,
            kinds,
            mode,
            degree,
            depth,
            seed,
            start,
            csv,
        } => {
            let kinds: Vec<Kind> = kinds.into_iter().map(Kind::from).collect();
            bench_cmd(family, &sizes, &procs, &kinds, mode.into(), degree, depth, seed, start, csv.as_deref())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn need(value: Option<usize>, flag: &str, family: FamilyArg) -> Result<usize, Failure> {
    value.ok_or_else(|| Failure::Input(format!("--{flag} is required for {family:?}")))
}

fn generate(
    family: FamilyArg,
    n: Option<usize>,
    m: Option<usize>,
    width: Option<usize>,
    depth: Option<usize>,
    seed: u64,
) -> Result<Graph, Failure> {
    let g = match family {
        FamilyArg::Path => generators::path(need(n, "n", family)?)?,
        FamilyArg::Complete => generators::complete(need(n, "n", family)?)?,
        FamilyArg::Star => generators::star_out(need(n, "n", family)?)?,
        FamilyArg::Gnm => generators::gnm(need(n, "n", family)?, need(m, "m", family)?, seed)?,
        FamilyArg::Layered => {
            generators::layered_dag(need(width, "width", family)?, need(depth, "depth", family)?, seed)?
        }
    };
    Ok(g)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn gen(
    family: FamilyArg,
    n: Option<usize>,
    m: Option<usize>,
    width: Option<usize>,
    depth: Option<usize>,
    seed: u64,
    out: Option<&Path>,
) -> CliResult {
    let g = generate(family, n, m, width, depth, seed)?;
    write_output(out, g.to_edge_list().as_bytes())
}

fn load(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Graph::parse_edge_list(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(kind: Kind, input: &Path, start: usize, a0: usize, procs: usize, mode: Backend, trace: bool) -> CliResult {
    let g = load(input)?;
    let mut engine = ParEngine::new(procs, mode)?;
    let mut eg = ElimGraph::build(&g, &mut engine)?;
    let built = engine.report();
    let result = if trace {
        let mut obs = TraceObserver::new(io::stderr().lock());
        match kind {
            Kind::Dfs => traversal::dfs_observed(&mut eg, start, a0, &mut engine, &mut obs)?,
            Kind::Bfs => traversal::bfs_observed(&mut eg, start, a0, &mut engine, &mut obs)?,
        }
    } else {
        match kind {
            Kind::Dfs => traversal::dfs(&mut eg, start, a0, &mut engine)?,
            Kind::Bfs => traversal::bfs(&mut eg, start, a0, &mut engine)?,
        }
    };
    let total = engine.report();
    let mut out = io::stdout().lock();
    out.write_all(result.to_dump().as_bytes())?;
    writeln!(out, "sync_steps_build={}", built.sync_steps)?;
    writeln!(out, "sync_steps_traverse={}", (total - built).sync_steps)?;
    out.write_all(total.to_key_values().as_bytes())?;
    Ok(())
}

fn parse_starts(spec: &str, n: usize) -> Result<Vec<usize>, Failure> {
    if spec.trim() == "all" {
        return Ok((0..n).collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Input(format!("bad start vertex {s:?}")))
        })
        .collect()
}

fn verify(
    input: &Path,
    kinds: &[KindArg],
    starts: &str,
    procs: usize,
    mode: Backend,
    against: Option<&Path>,
) -> CliResult {
    let g = load(input)?;
    let starts = parse_starts(starts, g.num_vertices())?;
    let kinds: Vec<Kind> = kinds.iter().copied().map(Kind::from).collect();
    let mut out = io::stdout().lock();

    if let Some(dump) = against {
        let (&kind, &start) = kinds
            .first()
            .zip(starts.first())
            .ok_or_else(|| Failure::Input("need a kind and a start".into()))?;
        let text = fs::read_to_string(dump)?;
        let actual = TraversalResult::parse_dump(&text)?;
        let expected = oracle_result(&g, kind, start, 0)?;
        let mismatches = compare_results(&expected, &actual);
        return match mismatches.first() {
            None => {
                writeln!(out, "PASS {kind} start={start}")?;
                Ok(())
            }
            Some(first) => {
                writeln!(out, "FAIL {kind} start={start}: {first}")?;
                Err(Failure::Mismatch)
            }
        };
    }

    let mut failed = 0;
    for &kind in &kinds {
        for &start in &starts {
            let mut engine = ParEngine::new(procs, mode)?;
            let report = traversal::verify_with_engine(&g, start, kind, &mut engine)?;
            match report.first_mismatch() {
                None => writeln!(out, "PASS {kind} start={start}")?,
                Some(first) => {
                    failed += 1;
                    writeln!(out, "FAIL {kind} start={start}: {first}")?;
                }
            }
        }
    }
    writeln!(out, "{} checks, {failed} failed", kinds.len() * starts.len())?;
    if failed > 0 {
        Err(Failure::Mismatch)
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd(
    family: FamilyArg,
    sizes: &[usize],
    procs: &[usize],
    kinds: &[Kind],
    mode: Backend,
    degree: usize,
    depth: usize,
    seed: u64,
    start: usize,
    csv: Option<&Path>,
) -> CliResult {
    let label = format!("{family:?}").to_lowercase();
    let mut rows: Vec<BenchRecord> = Vec::new();
    for &size in sizes {
        let g = match family {
            FamilyArg::Gnm => generate(family, Some(size), Some(degree * size), None, None, seed)?,
            FamilyArg::Layered => generate(family, None, None, Some(size), Some(depth), seed)?,
            _ => generate(family, Some(size), None, None, None, seed)?,
        };
        rows.extend(bench::bench_graph(&label, &g, start, procs, kinds, mode)?);
    }
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf)?;
    write_output(csv, &buf)
}
