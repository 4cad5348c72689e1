use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vsdo::harness::{evaluate, format_queries, generate, parse_queries, random_queries, verify, AnyOracle, GenSpec, GraphKind};
use vsdo::oracle_eps::{parse_ratio, Mode};
use vsdo::reductions::ScaledGraphFamily;
use vsdo::{EpsConfig, EpsOracle, PolyConfig, PolyOracle, WeightedGraph};

#[derive(Parser)]
#[command(name = "vsdo", version, about = "Distance oracles for weighted graphs under vertex failures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an oracle from a graph file and write a snapshot.
    Build(BuildArgs),
    /// Answer a query file against a snapshot.
    Query(QueryArgs),
    /// Evaluate a snapshot on a workload and print a JSON report.
    Eval(EvalArgs),
    /// Re-check the stored structures of a snapshot.
    Verify(VerifyArgs),
    /// Write a random graph, or a random query file for a graph.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    EpsExplicit,
    EpsExpath,
    EpsBipath,
    Poly,
}

#[derive(Args)]
struct BuildArgs {
    /// Graph file: `n m` then `m` lines `u v w`.
    graph: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "eps-bipath")]
    oracle: OracleKind,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    c: u32,
    /// Stretch parameter as `p/q`.
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    /// Wrap the oracle in the weight-range reduction.
    #[arg(long)]
    scale_weights: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Build every decision-tree node up front, aborting past this many bytes.
    #[arg(long)]
    mem_budget: Option<u64>,
    /// Build every decision-tree node up front.
    #[arg(long)]
    eager: bool,
    /// Override the high pseudo-degree threshold.
    #[arg(long)]
    threshold: Option<u64>,
}

#[derive(Args)]
struct QueryArgs {
    snapshot: PathBuf,
    /// Query file: `u v | f1 f2 …`.
    queries: PathBuf,
    /// Also print a path realizing each estimate.
    #[arg(long)]
    paths: bool,
    /// Run the poly decision oracle at this ρ and print YES/NO instead.
    #[arg(long)]
    rho: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    snapshot: PathBuf,
    /// Query file; random queries are generated when absent.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct VerifyArgs {
    snapshot: PathBuf,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "erdos-renyi")]
    kind: Kind,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_weight: u64,
    /// Write `count` queries with up to `d` failures for this graph file instead.
    #[arg(long)]
    queries_for: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    ErdosRenyi,
    Grid,
    StarAugmented,
    PowerLaw,
}

type Res<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Res<ExitCode> {
    match cli.cmd {
        Cmd::Build(a) => build(a),
        Cmd::Query(a) => query(a),
        Cmd::Eval(a) => eval(a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Generate(a) => generate_cmd(a),
    }
}

fn read_graph(path: &PathBuf) -> Res<WeightedGraph> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    WeightedGraph::parse(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn build(a: BuildArgs) -> Res<ExitCode> {
    let g = read_graph(&a.graph)?;
    let t = Instant::now();
    let oracle = match a.oracle {
        OracleKind::Poly => {
            let mut cfg = PolyConfig::new(a.d);
            cfg.c = a.c;
            cfg.threshold = a.threshold;
            cfg.seed = a.seed;
            if a.scale_weights {
                AnyOracle::ScaledPoly(ScaledGraphFamily::build(&g, |h| PolyOracle::build(h.clone(), &cfg))?)
            } else {
                AnyOracle::Poly(PolyOracle::build(g, &cfg)?)
            }
        }
        kind => {
            let mode = match kind {
                OracleKind::EpsExplicit => Mode::Explicit,
                OracleKind::EpsExpath => Mode::Expath,
                _ => Mode::Bipath,
            };
            let mut cfg = EpsConfig::new(a.d, parse_ratio(&a.epsilon)?, mode);
            cfg.c = a.c;
            cfg.threshold = a.threshold;
            cfg.seed = a.seed;
            cfg.eager = a.eager || a.mem_budget.is_some();
            cfg.mem_budget = a.mem_budget;
            if a.scale_weights {
                AnyOracle::ScaledEps(ScaledGraphFamily::build(&g, |h| EpsOracle::build(h.clone(), &cfg))?)
            } else {
                AnyOracle::Eps(EpsOracle::build(g, &cfg)?)
            }
        }
    };
    let elapsed = t.elapsed();
    oracle.save(&a.out)?;
    let bytes = fs::metadata(&a.out)?.len();
    eprintln!("built {} in {:.1} ms, snapshot {} bytes", oracle.name(), elapsed.as_secs_f64() * 1e3, bytes);
    Ok(ExitCode::SUCCESS)
}

fn load_queries(path: &PathBuf) -> Res<Vec<vsdo::harness::QueryRecord>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_queries(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn query(a: QueryArgs) -> Res<ExitCode> {
    let oracle = AnyOracle::load(&a.snapshot)?;
    let queries = load_queries(&a.queries)?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    for q in &queries {
        if let Some(rho) = a.rho {
            let AnyOracle::Poly(p) = &oracle else { return Err("--rho needs a poly snapshot".into()) };
            let r = p.decide_rho(q.u, q.v, &q.failures, rho, a.paths)?;
            write!(out, "{}", if r.yes { "YES" } else { "NO" })?;
            if let Some(path) = r.certificate.filter(|_| a.paths) {
                write!(out, " {}", join(&path.vertices))?;
            }
            writeln!(out)?;
            continue;
        }
        let ans = oracle.query(q.u, q.v, &q.failures, a.paths)?;
        match ans.estimate {
            None => write!(out, "inf")?,
            Some(e) if e.is_integer() => write!(out, "{}", e.to_integer())?,
            Some(e) => write!(out, "{}/{}", e.numer(), e.denom())?,
        }
        if let Some(p) = ans.path.filter(|_| a.paths) {
            write!(out, " {}", join(&p.vertices))?;
        }
        writeln!(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn join(vs: &[u32]) -> String {
    vs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn eval(a: EvalArgs) -> Res<ExitCode> {
    let bytes = fs::metadata(&a.snapshot)?.len();
    let oracle = AnyOracle::load(&a.snapshot)?;
    let queries = match &a.queries {
        Some(p) => load_queries(p)?,
        None => random_queries(oracle.graph(), oracle.d(), a.count, a.seed),
    };
    let mut report = evaluate(&oracle, &queries, a.threads)?;
    report.snapshot_bytes = Some(bytes);
    let _ = writeln!(io::stdout(), "{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.violations == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn verify_cmd(a: VerifyArgs) -> Res<ExitCode> {
    let oracle = AnyOracle::load(&a.snapshot)?;
    let report = verify(&oracle, a.samples, a.seed)?;
    let mut out = io::stdout().lock();
    for c in &report.checks {
        let _ = writeln!(out, "{} {} ({} checked)", if c.passed() { "PASS" } else { "FAIL" }, c.name, c.checked);
        for f in &c.failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn generate_cmd(a: GenerateArgs) -> Res<ExitCode> {
    if let Some(path) = &a.queries_for {
        let g = read_graph(path)?;
        let _ = write!(io::stdout(), "{}", format_queries(&random_queries(&g, a.d, a.count, a.seed)));
        return Ok(ExitCode::SUCCESS);
    }
    let kind = match a.kind {
        Kind::ErdosRenyi => GraphKind::ErdosRenyi,
        Kind::Grid => GraphKind::Grid,
        Kind::StarAugmented => GraphKind::StarAugmented,
        Kind::PowerLaw => GraphKind::PowerLaw,
    };
    let g = generate(&GenSpec::new(kind, a.n, a.seed, a.max_weight))?;
    let _ = write!(io::stdout(), "{}", g.to_text());
    Ok(ExitCode::SUCCESS)
}
