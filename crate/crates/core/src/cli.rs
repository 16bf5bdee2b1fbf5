//! Grep-style command-line front end and benchmark harness.
//!
//! Exit codes follow the grep convention: 0 if any record matched, 1 if
//! none did, 2 on usage or I/O errors.

use crate::classic_dp::{dp_all_graphs, dp_node_graph};
use crate::clustering::{build_cluster_tnfa, build_clusters, clusters_to_json, macro_tree_to_dot};
use crate::engine::{clustered_root_graph, EngineStats, SpaceMode};
use crate::generator::{random_ast, random_query, GenParams};
use crate::matchgraph::MatchGraph;
use crate::oracle::{default_cap, oracle_match_graph};
use crate::simulate::{simulator_by_name, TnfaSimulator};
use crate::syntax::{ast_to_dot, ast_to_json, parse, render, Alphabet, Ast};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_MATCH: i32 = 0;
pub const EXIT_NO_MATCH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "xregex",
    version,
    about = "Match extended regular expressions (with & and !) against strings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Match records against a pattern (grep-style exit codes).
    Match(MatchArgs),
    /// Dump the parse tree, clusters, or cluster automata.
    Inspect(InspectArgs),
    /// Compare engine wall times on seeded random instances.
    Bench(BenchArgs),
    /// Brute-force language-enumeration reference (small inputs only).
    #[command(hide = true)]
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Dp,
    Clustered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Naive,
    HeavyPath,
}

impl Space {
    fn mode(self) -> SpaceMode {
        match self {
            Space::Naive => SpaceMode::NaiveBottomUp,
            Space::HeavyPath => SpaceMode::HeavyPath,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Ast,
    Clusters,
    Tnfa,
    Graphs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// The pattern to match.
    #[arg(short = 'e', long)]
    pub pattern: String,

    /// Read newline-delimited records from this file.
    #[arg(short = 'f', long, conflicts_with = "query")]
    pub file: Option<PathBuf>,

    /// Records given directly on the command line.
    #[arg(value_name = "QUERY")]
    pub query: Vec<String>,

    #[arg(long, value_enum, default_value_t = Algo::Clustered)]
    pub algo: Algo,

    /// Cluster-graph retention policy (clustered algo only).
    #[arg(long, value_enum, default_value_t = Space::HeavyPath)]
    pub space: Space,

    /// TNFA simulator backing the clustered algo.
    #[arg(long, default_value = "thompson")]
    pub simulator: String,

    /// Restrict records to these characters (error on anything else).
    #[arg(long)]
    pub alphabet: Option<String>,

    /// Print every matching span of each record, 1-based inclusive.
    #[arg(long)]
    pub substrings: bool,

    /// Succeed if any substring matches, not just the whole record.
    #[arg(long)]
    pub search: bool,

    /// Print engine statistics (clustered algo only).
    #[arg(long)]
    pub stats: bool,

    /// Dump internals instead of matching.
    #[arg(long, value_enum)]
    pub dump: Option<Dump>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(short = 'e', long)]
    pub pattern: String,

    #[arg(long, value_enum, default_value_t = Dump::Ast)]
    pub dump: Dump,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0xC0FFEE)]
    pub seed: u64,

    /// Number of generated instances.
    #[arg(long, default_value_t = 5)]
    pub instances: usize,

    /// Query length.
    #[arg(short = 'n', long, default_value_t = 256)]
    pub query_len: usize,

    /// Approximate pattern size (parse-tree nodes).
    #[arg(short = 'm', long, default_value_t = 400)]
    pub pattern_size: usize,

    /// Number of extended operators per pattern.
    #[arg(short = 'k', long, default_value_t = 1)]
    pub extended_ops: usize,

    #[arg(long, default_value = "ab")]
    pub alphabet: String,

    #[arg(long, default_value = "thompson")]
    pub simulator: String,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(short = 'e', long)]
    pub pattern: String,

    #[arg(value_name = "QUERY")]
    pub query: String,

    #[arg(long)]
    pub alphabet: Option<String>,
}

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

/// Runs the parsed command, writing to `out`. Returns the process exit
/// code; errors are reported by the caller with code 2.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    match cli.cmd {
        Command::Match(args) => cmd_match(args, out),
        Command::Inspect(args) => {
            cmd_inspect(args, out)?;
            Ok(EXIT_MATCH)
        }
        Command::Bench(args) => {
            cmd_bench(args, out)?;
            Ok(EXIT_MATCH)
        }
        Command::Oracle(args) => cmd_oracle(args, out),
    }
}

fn parse_pattern(text: &str) -> Result<Ast, CliError> {
    parse(text).map_err(|e| CliError(format!("pattern: {e}")))
}

fn load_records(args: &MatchArgs) -> Result<Vec<Vec<u8>>, CliError> {
    if let Some(path) = &args.file {
        let data = fs::read(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        let mut records: Vec<Vec<u8>> = data.split(|&b| b == b'\n').map(<[u8]>::to_vec).collect();
        if records.last().is_some_and(Vec::is_empty) && data.last() == Some(&b'\n') {
            records.pop();
        }
        Ok(records)
    } else if args.query.is_empty() {
        Err(CliError("no input: pass QUERY arguments or --file".into()))
    } else {
        Ok(args.query.iter().map(|q| q.as_bytes().to_vec()).collect())
    }
}

fn root_graph(
    ast: &Ast,
    q: &[u8],
    algo: Algo,
    mode: SpaceMode,
    sim: &dyn TnfaSimulator,
) -> (MatchGraph, Option<EngineStats>) {
    match algo {
        Algo::Dp => (dp_node_graph(ast, ast.root(), q), None),
        Algo::Clustered => {
            let (g, stats) = clustered_root_graph(ast, q, sim, mode);
            (g, Some(stats))
        }
    }
}

fn spans_with_text(g: &MatchGraph, q: &[u8]) -> Vec<(usize, usize, String)> {
    g.edges()
        .into_iter()
        .map(|(i, j)| (i + 1, j, String::from_utf8_lossy(&q[i..j]).into_owned()))
        .collect()
}

fn cmd_match(args: MatchArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let ast = parse_pattern(&args.pattern)?;
    if let Some(dump) = args.dump {
        if dump == Dump::Graphs {
            return dump_graphs(&args, &ast, out).map(|()| EXIT_MATCH);
        }
        dump_structure(&ast, dump, args.format, out)?;
        return Ok(EXIT_MATCH);
    }
    if args.stats && args.algo != Algo::Clustered {
        return Err(CliError("--stats requires --algo clustered".into()));
    }
    if args.format == Format::Dot {
        return Err(CliError("dot output applies only to --dump".into()));
    }
    let sim = simulator_by_name(&args.simulator)
        .ok_or_else(|| CliError(format!("unknown simulator `{}`", args.simulator)))?;
    let records = load_records(&args)?;
    if let Some(sigma) = &args.alphabet {
        let alpha = Alphabet::from_bytes(sigma.as_bytes());
        for r in &records {
            if let Some(&c) = r.iter().find(|&&c| !alpha.contains(c)) {
                return Err(CliError(format!(
                    "record contains {:?}, outside --alphabet {sigma:?}",
                    c as char
                )));
            }
        }
    }

    let mut any = false;
    let mut json_records = Vec::new();
    for q in &records {
        let (g, stats) = root_graph(&ast, q, args.algo, args.space.mode(), sim.as_ref());
        let matched = if args.search {
            g.edge_count() > 0
        } else {
            g.has_edge(0, q.len())
        };
        any |= matched;
        let record_text = String::from_utf8_lossy(q).into_owned();
        match args.format {
            Format::Text => {
                writeln!(out, "{}\t{record_text}", if matched { "match" } else { "no-match" })?;
                if args.substrings {
                    for (i, j, s) in spans_with_text(&g, q) {
                        writeln!(out, "[{i},{j}] {s}")?;
                    }
                }
                if args.stats {
                    let stats = stats.as_ref().expect("clustered stats");
                    writeln!(out, "{}", serde_json::to_string(stats)?)?;
                }
            }
            Format::Json => {
                let mut obj = serde_json::json!({
                    "record": record_text,
                    "matched": matched,
                });
                if args.substrings {
                    let spans: Vec<serde_json::Value> = spans_with_text(&g, q)
                        .into_iter()
                        .map(|(i, j, s)| serde_json::json!({"span": [i, j], "text": s}))
                        .collect();
                    obj["spans"] = serde_json::Value::Array(spans);
                }
                if args.stats {
                    obj["stats"] = serde_json::to_value(stats.as_ref().expect("clustered stats"))?;
                }
                json_records.push(obj);
            }
            Format::Dot => unreachable!("rejected above"),
        }
    }
    if args.format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json_records)?)?;
    }
    Ok(if any { EXIT_MATCH } else { EXIT_NO_MATCH })
}

/// Per-node match graphs of every record, computed by the dynamic
/// program.
fn dump_graphs(args: &MatchArgs, ast: &Ast, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let records = load_records(args)?;
    let mut json_records = Vec::new();
    for q in &records {
        match args.format {
            Format::Text => {
                writeln!(out, "query: {}", String::from_utf8_lossy(q))?;
                let mut lines = vec![String::new(); ast.node_count()];
                dp_all_graphs(ast, q, &mut |v, g| {
                    let mut line = format!(
                        "node {v} ({}): ",
                        node_label(ast, v)
                    );
                    let edges = g.edges();
                    let _ = write!(line, "{edges:?}");
                    lines[v] = line;
                });
                for line in lines {
                    writeln!(out, "{line}")?;
                }
            }
            Format::Json => {
                let mut nodes = vec![serde_json::Value::Null; ast.node_count()];
                dp_all_graphs(ast, q, &mut |v, g| {
                    nodes[v] = serde_json::json!({
                        "node": v,
                        "kind": ast.kind(v).op_name(),
                        "edges": g.edges(),
                    });
                });
                json_records.push(serde_json::json!({
                    "query": String::from_utf8_lossy(q),
                    "graphs": nodes,
                }));
            }
            Format::Dot => return Err(CliError("--dump graphs supports text or json".into())),
        }
    }
    if args.format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json_records)?)?;
    }
    Ok(())
}

fn node_label(ast: &Ast, v: usize) -> String {
    match ast.kind(v) {
        crate::syntax::AstKind::Char(c) => format!("char {:?}", c as char),
        kind => kind.op_name().to_string(),
    }
}

fn cmd_inspect(args: InspectArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let ast = parse_pattern(&args.pattern)?;
    dump_structure(&ast, args.dump, args.format, out)
}

fn dump_structure(
    ast: &Ast,
    dump: Dump,
    format: Format,
    out: &mut dyn std::io::Write,
) -> Result<(), CliError> {
    match (dump, format) {
        (Dump::Ast, Format::Text) => {
            writeln!(out, "pattern: {}", render(ast))?;
            writeln!(out, "nodes: {}", ast.node_count())?;
            writeln!(out, "extended operators: {}", ast.count_extended())?;
        }
        (Dump::Ast, Format::Json) => {
            writeln!(out, "{}", serde_json::to_string_pretty(&ast_to_json(ast))?)?;
        }
        (Dump::Ast, Format::Dot) => write!(out, "{}", ast_to_dot(ast))?,
        (Dump::Clusters, format) => {
            let (cp, mt) = build_clusters(ast);
            match format {
                Format::Text => {
                    writeln!(out, "clusters: {}", cp.clusters.len())?;
                    for (c, cluster) in cp.clusters.iter().enumerate() {
                        writeln!(
                            out,
                            "cluster {c}: root node {} ({}), m_C = {}, extended = {}, children = {:?}{}",
                            cluster.root,
                            node_label(ast, cluster.root),
                            cluster.size_mc(),
                            cluster
                                .extended
                                .map_or("none".to_string(), |p| p.to_string()),
                            mt.children[c],
                            if mt.is_heavy(c) { ", heavy" } else { "" },
                        )?;
                    }
                }
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&clusters_to_json(ast, &cp, &mt))?
                )?,
                Format::Dot => write!(out, "{}", macro_tree_to_dot(&cp, &mt))?,
            }
        }
        (Dump::Tnfa, format) => {
            let (cp, _mt) = build_clusters(ast);
            let mut json_automata = Vec::new();
            for c in 0..cp.clusters.len() {
                // a single-node internal cluster has no automaton: its
                // graph comes straight from the child cluster graphs
                let a = match build_cluster_tnfa(ast, &cp, c) {
                    Ok(a) => a,
                    Err(_) => {
                        match format {
                            Format::Text => writeln!(
                                out,
                                "cluster {c}: single extended node, no automaton"
                            )?,
                            Format::Json => json_automata.push(serde_json::json!({
                                "cluster": c,
                                "automaton": serde_json::Value::Null,
                            })),
                            Format::Dot => {}
                        }
                        continue;
                    }
                };
                match format {
                    Format::Text => {
                        writeln!(
                            out,
                            "cluster {c}: {} states, {} transitions, start {} accept {}{}",
                            a.state_count(),
                            a.transitions().len(),
                            a.theta(),
                            a.phi(),
                            a.extended().map_or(String::new(), |(tp, fp)| format!(
                                ", extended transition {tp} -> {fp}"
                            )),
                        )?;
                    }
                    Format::Json => {
                        let transitions: Vec<serde_json::Value> = a
                            .transitions()
                            .iter()
                            .map(|&(from, to, label)| {
                                serde_json::json!({
                                    "from": from,
                                    "to": to,
                                    "label": format!("{label:?}"),
                                })
                            })
                            .collect();
                        json_automata.push(serde_json::json!({
                            "cluster": c,
                            "states": a.state_count(),
                            "start": a.theta(),
                            "accept": a.phi(),
                            "extended": a.extended().map(|(tp, fp)| vec![tp, fp]),
                            "transitions": transitions,
                        }));
                    }
                    Format::Dot => write!(out, "{}", a.to_dot())?,
                }
            }
            if format == Format::Json {
                writeln!(out, "{}", serde_json::to_string_pretty(&json_automata)?)?;
            }
        }
        (Dump::Graphs, _) => {
            return Err(CliError("--dump graphs needs a query; use the match command".into()))
        }
    }
    Ok(())
}

#[derive(Debug, serde::Serialize)]
struct BenchInstance {
    pattern_nodes: usize,
    query_len: usize,
    dp_ns: u128,
    clustered_naive_ns: u128,
    clustered_naive_peak: usize,
    clustered_heavy_ns: u128,
    clustered_heavy_peak: usize,
}

fn median(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

fn cmd_bench(args: BenchArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    if args.instances == 0 {
        return Err(CliError("--instances must be positive".into()));
    }
    let sim = simulator_by_name(&args.simulator)
        .ok_or_else(|| CliError(format!("unknown simulator `{}`", args.simulator)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let params = GenParams {
        node_budget: args.pattern_size,
        extended_ops: args.extended_ops,
        alphabet: args.alphabet.as_bytes().to_vec(),
        star_weight: 6,
    };
    let mut instances = Vec::new();
    for _ in 0..args.instances {
        let ast = random_ast(&mut rng, &params);
        let q = random_query(&mut rng, params.alphabet.as_slice(), args.query_len);

        let t = Instant::now();
        let g_dp = dp_node_graph(&ast, ast.root(), &q);
        let dp_ns = t.elapsed().as_nanos();

        let t = Instant::now();
        let (g_naive, naive_stats) =
            clustered_root_graph(&ast, &q, sim.as_ref(), SpaceMode::NaiveBottomUp);
        let clustered_naive_ns = t.elapsed().as_nanos();

        let t = Instant::now();
        let (g_heavy, heavy_stats) =
            clustered_root_graph(&ast, &q, sim.as_ref(), SpaceMode::HeavyPath);
        let clustered_heavy_ns = t.elapsed().as_nanos();

        if g_dp != g_naive || g_dp != g_heavy {
            return Err(CliError("engines disagree on a generated instance".into()));
        }
        instances.push(BenchInstance {
            pattern_nodes: ast.node_count(),
            query_len: q.len(),
            dp_ns,
            clustered_naive_ns,
            clustered_naive_peak: naive_stats.peak_live_graphs,
            clustered_heavy_ns,
            clustered_heavy_peak: heavy_stats.peak_live_graphs,
        });
    }
    let med_dp = median(instances.iter().map(|i| i.dp_ns).collect());
    let med_naive = median(instances.iter().map(|i| i.clustered_naive_ns).collect());
    let med_heavy = median(instances.iter().map(|i| i.clustered_heavy_ns).collect());
    match args.format {
        Format::Text => {
            writeln!(
                out,
                "{:>4} {:>6} {:>5} {:>12} {:>16} {:>6} {:>16} {:>6}",
                "inst", "nodes", "n", "dp_ns", "clustered_naive", "peak", "clustered_heavy", "peak"
            )?;
            for (idx, i) in instances.iter().enumerate() {
                writeln!(
                    out,
                    "{idx:>4} {:>6} {:>5} {:>12} {:>16} {:>6} {:>16} {:>6}",
                    i.pattern_nodes,
                    i.query_len,
                    i.dp_ns,
                    i.clustered_naive_ns,
                    i.clustered_naive_peak,
                    i.clustered_heavy_ns,
                    i.clustered_heavy_peak,
                )?;
            }
            writeln!(
                out,
                "median: dp {med_dp} ns, clustered naive {med_naive} ns, clustered heavy-path {med_heavy} ns"
            )?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "seed": args.seed,
                "instances": instances,
                "median_ns": {
                    "dp": med_dp,
                    "clustered_naive": med_naive,
                    "clustered_heavy": med_heavy,
                },
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Dot => return Err(CliError("bench supports text or json".into())),
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let ast = parse_pattern(&args.pattern)?;
    let q = args.query.as_bytes();
    let alphabet = match &args.alphabet {
        Some(sigma) => Alphabet::from_bytes(sigma.as_bytes()),
        None => Alphabet::from_pattern_and_query(&ast, q),
    };
    let g = oracle_match_graph(&ast, q, &alphabet, default_cap())
        .map_err(|e| CliError(e.to_string()))?;
    for (i, j, s) in spans_with_text(&g, q) {
        writeln!(out, "[{i},{j}] {s}")?;
    }
    Ok(if g.has_edge(0, q.len()) { EXIT_MATCH } else { EXIT_NO_MATCH })
}
