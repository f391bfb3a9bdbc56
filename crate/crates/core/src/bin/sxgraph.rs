//! Command-line driver: construct graphs, run analyses, reproduce the
//! frozen experiment suites.
//!
//! Exit codes: 0 success, 2 invalid config/usage, 3 enumeration budget or
//! dense-solve gate tripped, 4 an experiment check failed.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use sxgraph::config::ExperimentConfig;
use sxgraph::experiments::{manifest, reproduce, run_analyses};
use sxgraph::graph::{GraphFile, RegularMultigraph};
use sxgraph::report::{atomic_write, ReportWriter, TOOL_VERSION};
use sxgraph::{Error, Result};

#[derive(Parser)]
#[command(
    name = "sxgraph",
    version,
    about = "Spectral toolkit for regular multigraphs",
    after_help = "Exit codes: 0 ok, 2 config error, 3 budget/gate error, 4 experiment check failed."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the configured graph and write it as `graph.json` (with family,
    /// parameters, seed, and tool version embedded).
    Construct(ConstructArgs),
    /// Run the analyses the config requests, one CSV/JSON report pair per
    /// analysis plus a checksummed `index.json`.
    Analyze(AnalyzeArgs),
    /// Re-run one of the frozen experiment suites against its pinned
    /// manifest and report pass/fail per check.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the per-source path enumeration budget.
    #[arg(long = "budget-paths")]
    budget_paths: Option<u64>,
    /// Override the dense eigensolve size gate.
    #[arg(long = "dense-limit")]
    dense_limit: Option<usize>,
    /// Size of the worker thread pool (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Analyze a previously constructed `graph.json` instead of rebuilding
    /// the graph from the config.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Suite name: example_theorem, equivalence_suite, quotient_suite, or
    /// zeta_suite.
    name: String,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Size of the worker thread pool (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Construct(args) => {
            init_threads(args.common.threads)?;
            let cfg = load_config(&args.common)?;
            let g = cfg.build_graph()?;
            std::fs::create_dir_all(&args.common.out)?;
            let path = args.common.out.join("graph.json");
            let mut bytes = serde_json::to_vec_pretty(&g.to_json())?;
            bytes.push(b'\n');
            atomic_write(&path, &bytes)?;
            println!("constructed {} ({} vertices, degree {})", path.display(), g.n(), g.degree());
        }
        Cmd::Analyze(args) => {
            init_threads(args.common.threads)?;
            let cfg = load_config(&args.common)?;
            let g = match &args.graph {
                Some(path) => {
                    let file: GraphFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    RegularMultigraph::from_json(file)?
                }
                None => cfg.build_graph()?,
            };
            let mut w = ReportWriter::new(&args.common.out, &cfg.config_hash())?;
            run_analyses(&g, &cfg, &mut w)?;
            let dir = w.finish()?;
            println!("analyzed {} analyses into {}", cfg.analyses.len(), dir.display());
        }
        Cmd::Reproduce(args) => {
            init_threads(args.threads)?;
            let tag = format!("manifest-v{}", manifest().version);
            reject_mismatched_reports(&args.out, &tag)?;
            let mut w = ReportWriter::new(&args.out, &tag)?;
            let outcome = reproduce(&args.name, &mut w)?;
            w.finish()?;
            println!("{}", outcome.render());
            if !outcome.passed {
                return Err(Error::CheckFailed(format!("suite {} failed", args.name)));
            }
        }
    }
    Ok(())
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    // Parse without validating: the flag overrides below may be what makes
    // the config valid (e.g. --seed for a randomized family).
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&std::fs::read_to_string(&common.config)?)?;
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if let Some(b) = common.budget_paths {
        cfg.budgets.path_budget = b;
    }
    if let Some(d) = common.dense_limit {
        cfg.budgets.dense_limit = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// A reproduce run refuses to mix its reports with ones produced under a
/// different manifest version or tool: existing reports must carry the same
/// embedded tag.
fn reject_mismatched_reports(out: &Path, tag: &str) -> Result<()> {
    let index = out.join("index.json");
    let Ok(text) = std::fs::read_to_string(&index) else {
        return Ok(());
    };
    let parsed: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("existing {} is unreadable: {e}", index.display())))?;
    let found = parsed["config_hash"].as_str().unwrap_or("<missing>");
    let version = parsed["tool_version"].as_str().unwrap_or("<missing>");
    if found != tag || version != TOOL_VERSION {
        return Err(Error::Config(format!(
            "{} holds reports for {found} (tool {version}), not {tag} (tool {TOOL_VERSION}); \
             use a fresh --out directory",
            index.display()
        )));
    }
    Ok(())
}
