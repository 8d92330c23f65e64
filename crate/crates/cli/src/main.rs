//! Command-line front end: partition graphs, generate benchmark instances,
//! analyze partitions and clusterings, and build performance profiles.
//!
//! Stdout is reserved for machine-readable results (the summary line, JSON,
//! or CSV); everything else goes to stderr. Exit codes: 0 success, 1 on
//! IO/parse/flag errors, 2 when a partition is structurally infeasible
//! (the partition is still written).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparsecut::analysis::{self, ProfileEntry};
use sparsecut::clustering::ClusteringParams;
use sparsecut::driver::{partition, PartitionerConfig};
use sparsecut::generate::{generate, GeneratorSpec};
use sparsecut::graph::Weight;
use sparsecut::metis::{read_metis_file, write_metis_file};
use sparsecut::partition::{BalanceSpec, Partition};
use sparsecut::sparsification::{Sparsifier, SparsifyConfig};
use sparsecut::Clustering;

#[derive(Parser)]
#[command(
    name = "sparsecut",
    version,
    about = "Multilevel balanced graph partitioning with linear total work"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a graph into k balanced blocks.
    Partition(PartitionArgs),
    /// Generate a benchmark graph in METIS format.
    Gen(GenArgs),
    /// Report metrics for a partition or clustering of a graph.
    Analyze(AnalyzeArgs),
    /// Convert a table of per-instance results into performance-profile
    /// breakpoints.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct PartitionArgs {
    /// Input graph (METIS format).
    #[arg(long)]
    graph: PathBuf,
    /// Number of blocks.
    #[arg(long)]
    k: usize,
    /// Allowed relative block overweight.
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
    /// Edge sampling method for overly dense coarse levels:
    /// none, uniform, t-weight, t-ff, or t-wff.
    #[arg(long, default_value = "t-weight", value_parser = parse_sparsifier)]
    sparsifier: Sparsifier,
    /// Sampling budget as a fraction of the finer level's edges.
    #[arg(long = "tau-e", default_value_t = 0.5)]
    tau_e: f64,
    /// Sampling budget as a fraction of the finer level's density.
    #[arg(long = "tau-d", default_value_t = 0.5)]
    tau_d: f64,
    /// Sampling triggers only above this multiple of the budget.
    #[arg(long, default_value_t = 4.0)]
    rho: f64,
    /// Fire stop probability after each burned edge.
    #[arg(long = "ff-p", default_value_t = 0.6)]
    ff_p: f64,
    /// Fires launch until this fraction of edges has burned.
    #[arg(long = "ff-nu", default_value_t = 0.5)]
    ff_nu: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Rounds per clustering and refinement pass.
    #[arg(long, default_value_t = 5)]
    rounds: usize,
    /// Write the partition here (one 0-based block id per line, node order).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write run statistics here as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Keep wall-clock timings in the stats JSON. Off by default so that
    /// identical flags and seed produce byte-identical stats files.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Graph family: er (Erdos-Renyi) or planted (planted partition).
    #[arg(long = "type")]
    family: Family,
    /// Number of nodes.
    #[arg(long)]
    n: usize,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Intra-block edge probability (planted).
    #[arg(long = "p-in")]
    p_in: Option<f64>,
    /// Inter-block edge probability (planted).
    #[arg(long = "p-out")]
    p_out: Option<f64>,
    /// Number of planted blocks (planted).
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output METIS file; planted graphs also write `<out>.truth` with the
    /// planted block of each node.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Er,
    Planted,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input graph (METIS format).
    #[arg(long)]
    graph: PathBuf,
    /// Partition file (metrics mode): one 0-based block id per line.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Clustering file (modularity mode): one cluster id per line.
    #[arg(long)]
    clustering: Option<PathBuf>,
    /// What to report (JSON on stdout).
    #[arg(long)]
    mode: Mode,
    /// Block count context: metrics checks balance against it, reduction
    /// sizes its cluster weight limit from it. Defaults to the partition's
    /// own block count (metrics) or 2 (reduction).
    #[arg(long)]
    k: Option<usize>,
    /// Balance tolerance used by metrics mode.
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Cut and balance of a partition (needs --partition).
    Metrics,
    /// Clustering quality report (needs --clustering).
    Modularity,
    /// Cluster the graph once and relate the contracted size to the
    /// clustering's modularity.
    Reduction,
}

#[derive(Args)]
struct ProfileArgs {
    /// CSV table with header `algorithm,instance,cut`.
    #[arg(long)]
    cuts: PathBuf,
}

fn parse_sparsifier(s: &str) -> Result<Sparsifier, String> {
    Sparsifier::from_str(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; bad flags are not.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Partition(args) => cmd_partition(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Profile(args) => cmd_profile(&args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

/// Write machine-readable output to stdout. A broken pipe means the
/// downstream consumer stopped reading (e.g. `... | head`); that is not an
/// error, so the write is abandoned and the command keeps its exit code.
fn emit(text: &str) -> Result<(), String> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("stdout: {e}")),
        _ => Ok(()),
    }
}

fn cmd_partition(args: &PartitionArgs) -> Result<ExitCode, String> {
    let g = read_metis_file(&args.graph).map_err(|e| format!("{}: {e}", args.graph.display()))?;
    let cfg = PartitionerConfig {
        k: args.k,
        epsilon: args.epsilon,
        sparsify: SparsifyConfig {
            method: args.sparsifier,
            edge_fraction: args.tau_e,
            density_fraction: args.tau_d,
            min_reduction: args.rho,
            fire_stop_probability: args.ff_p,
            burn_ratio: args.ff_nu,
            seed: args.seed,
        },
        cluster_rounds: args.rounds,
        refine_rounds: args.rounds,
        seed: args.seed,
        ..PartitionerConfig::default()
    };
    let (p, mut stats) = partition(&g, &cfg).map_err(|e| e.to_string())?;
    if !args.timings {
        stats.timings = None;
    }
    if let Some(path) = &args.out {
        write_ids(path, p.assignment())?;
    }
    if let Some(path) = &args.stats {
        let json = serde_json::to_string_pretty(&stats).map_err(|e| e.to_string())?;
        fs::write(path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    emit(&format!(
        "cut={} imbalance={:?} feasible={}\n",
        stats.cut, stats.imbalance, stats.feasible
    ))?;
    Ok(ExitCode::from(if stats.feasible { 0 } else { 2 }))
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode, String> {
    let spec = match args.family {
        Family::Er => {
            let p = args.p.ok_or("--type er requires --p")?;
            if args.p_in.is_some() || args.p_out.is_some() || args.blocks.is_some() {
                return Err("--p-in/--p-out/--blocks only apply to --type planted".into());
            }
            GeneratorSpec::erdos_renyi(args.n, p, args.seed)
        }
        Family::Planted => {
            let p_in = args.p_in.ok_or("--type planted requires --p-in")?;
            let p_out = args.p_out.ok_or("--type planted requires --p-out")?;
            let blocks = args.blocks.ok_or("--type planted requires --blocks")?;
            if args.p.is_some() {
                return Err("--p only applies to --type er".into());
            }
            GeneratorSpec::planted_partition(args.n, blocks, p_in, p_out, args.seed)
        }
    };
    let g = generate(&spec).map_err(|e| e.to_string())?;
    write_metis_file(&g, &args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    if let Some(truth) = spec.ground_truth() {
        let path = PathBuf::from(format!("{}.truth", args.out.display()));
        write_ids(&path, &truth)?;
    }
    eprintln!(
        "wrote {} ({} nodes, {} edges)",
        args.out.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(ExitCode::SUCCESS)
}

/// Cut plus the balance report of a partition.
#[derive(Serialize)]
struct MetricsOut {
    cut: Weight,
    #[serde(flatten)]
    balance: analysis::ImbalanceReport,
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode, String> {
    let g = read_metis_file(&args.graph).map_err(|e| format!("{}: {e}", args.graph.display()))?;
    let json = match args.mode {
        Mode::Metrics => {
            let path = args
                .partition
                .as_ref()
                .ok_or("--mode metrics requires --partition")?;
            let ids = read_ids(path)?;
            let blocks = ids.iter().copied().max().map_or(0, |b| b as usize + 1);
            let k = args.k.unwrap_or(blocks);
            if k < blocks {
                return Err(format!("--k {k} below the partition's {blocks} blocks"));
            }
            let p = Partition::from_assignment(&g, ids, k).map_err(|e| e.to_string())?;
            let spec = BalanceSpec::new(k, args.epsilon, g.total_node_weight());
            let out = MetricsOut {
                cut: analysis::cut(&g, &p),
                balance: analysis::imbalance_report(&p, &spec),
            };
            serde_json::to_string_pretty(&out)
        }
        Mode::Modularity => {
            let path = args
                .clustering
                .as_ref()
                .ok_or("--mode modularity requires --clustering")?;
            let ids = read_ids(path)?;
            if ids.len() != g.node_count() {
                return Err(format!(
                    "clustering has {} entries for {} nodes",
                    ids.len(),
                    g.node_count()
                ));
            }
            let c = Clustering::from_assignment(&g, &ids);
            let report = analysis::modularity_report(&g, &c).map_err(|e| e.to_string())?;
            serde_json::to_string_pretty(&report)
        }
        Mode::Reduction => {
            // Weight limit: the partitioner's own limit for k blocks, but
            // at least twice the average node weight — the smallest limit
            // that admits any guaranteed shrink.
            let k = args.k.unwrap_or(2).max(1);
            let total = g.total_node_weight();
            let average_floor = 2 * total / (g.node_count().max(1) as Weight);
            let limit = (total / (160 * k) as Weight).max(average_floor).max(1);
            let params = ClusteringParams::new(limit, 5, 1);
            let study = analysis::edge_reduction_study(&g, &params).map_err(|e| e.to_string())?;
            serde_json::to_string_pretty(&study)
        }
    };
    let mut text = json.map_err(|e| e.to_string())?;
    text.push('\n');
    emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(args: &ProfileArgs) -> Result<ExitCode, String> {
    let text =
        fs::read_to_string(&args.cuts).map_err(|e| format!("{}: {e}", args.cuts.display()))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "algorithm,instance,cut" => {}
        _ => return Err("expected CSV header: algorithm,instance,cut".into()),
    }
    let mut entries = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, ',').collect();
        let [algorithm, instance, value] = fields[..] else {
            return Err(format!("line {}: expected 3 comma-separated fields", i + 1));
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|e| format!("line {}: bad cut value: {e}", i + 1))?;
        entries.push(ProfileEntry {
            algorithm: algorithm.trim().to_string(),
            instance: instance.trim().to_string(),
            value,
        });
    }
    let (curves, warnings) = analysis::performance_profile(&entries).map_err(|e| e.to_string())?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let mut out = String::from("algorithm,tau,fraction\n");
    for curve in curves {
        for (tau, fraction) in curve.points {
            out.push_str(&format!("{},{:?},{:?}\n", curve.algorithm, tau, fraction));
        }
    }
    emit(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn read_ids(path: &Path) -> Result<Vec<u32>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            line.trim()
                .parse::<u32>()
                .map_err(|e| format!("{}:{}: {e}", path.display(), i + 1))
        })
        .collect()
}

fn write_ids(path: &Path, ids: &[u32]) -> Result<(), String> {
    let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = std::io::BufWriter::new(file);
    for id in ids {
        writeln!(out, "{id}").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    out.flush().map_err(|e| format!("{}: {e}", path.display()))
}
