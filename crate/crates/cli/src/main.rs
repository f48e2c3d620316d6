//! Command-line frontend: quiver ingestion, exchange-graph enumeration,
//! verification runs, and exports.
//!
//! Exit codes: 0 on success, 1 when a check reports violations, 2 on bad
//! input.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cluster_atlas::atlas::{enumerate, EnumerationLimits, ExchangeAtlas};
use cluster_atlas::checks::{
    unistructural_search, verify_conjecture3, verify_conjecture4, verify_lemma21,
    verify_theorem1, CheckReport, SearchBudget,
};
use cluster_atlas::presets::{preset, PRESET_NAMES};
use cluster_atlas::quiver::{load_quiver_json, BMatrix};
use cluster_atlas::rank2::enumerate_chain;
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cluster-atlas",
    about = "Exact engine for quiver mutation and exchange-graph exploration",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the exchange graph of a quiver.
    Enumerate {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the cluster variables with their denominator vectors.
    Variables {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Expand one variable in the coordinates of one seed.
    Expand {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
        /// Variable index, as listed by `variables`.
        #[arg(long)]
        var: usize,
        /// Seed index, as listed in the atlas JSON.
        #[arg(long)]
        seed: usize,
    },
    /// Run a verification and emit its JSON report.
    Check {
        #[command(subcommand)]
        which: CheckKind,
    },
    /// Run the rank-2 recurrence and report the special variables.
    Rank2 {
        /// Number of parallel arrows in the rank-2 quiver.
        #[arg(long)]
        r: u32,
        /// Window radius of the recurrence.
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum CheckKind {
    /// Compatibility iff no denominator occurrence, all ordered pairs.
    Conjecture3 {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        replay: ReplayArgs,
    },
    /// Denominator-avoidance is symmetric.
    Conjecture4 {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        replay: ReplayArgs,
    },
    /// Compatible pairs have clean denominators (any atlas status).
    Lemma21 {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        replay: ReplayArgs,
    },
    /// Search for alternative cluster structures on the variable set.
    Unistructural {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        replay: ReplayArgs,
        /// Bound on candidate exchange-matrix entries.
        #[arg(long)]
        bound: Option<i32>,
        /// Cap on exchange steps per candidate closure.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Field maps permuting the variable set map clusters to clusters.
    Theorem1 {
        #[command(flatten)]
        quiver: QuiverSource,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        replay: ReplayArgs,
        /// Cap on field-map evaluations.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
}

#[derive(Args)]
struct ReplayArgs {
    /// Seed recorded in the report parameters for reproducibility.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct QuiverSource {
    /// Named quiver: a2..a5, d4, d5, e6, kronecker, atilde12.
    #[arg(long)]
    preset: Option<String>,
    /// Path to a quiver JSON file (arrow list or matrix form).
    #[arg(long)]
    quiver: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    /// Stop discovering after this many seeds.
    #[arg(long, default_value_t = 100_000)]
    max_seeds: usize,
    /// Stop expanding seeds beyond this BFS depth.
    #[arg(long, default_value_t = 64)]
    max_depth: u32,
    /// Worker threads (fallback: CLUSTER_ATLAS_WORKERS, then 1).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Enumerate { quiver, common } => {
            let atlas = build_atlas(&quiver, &common)?;
            let rendered = match common.format {
                Format::Json => atlas.to_json(),
                Format::Dot => atlas.to_dot(),
                Format::Table => atlas_summary(&atlas),
            };
            emit(&common, &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Variables { quiver, common } => {
            let atlas = build_atlas(&quiver, &common)?;
            let rendered = match common.format {
                Format::Json | Format::Dot => variables_json(&atlas),
                Format::Table => variables_table(&atlas),
            };
            emit(&common, &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Expand {
            quiver,
            common,
            var,
            seed,
        } => {
            let atlas = build_atlas(&quiver, &common)?;
            let expansion = atlas.expand_in_base(var, seed)?;
            let rendered = match common.format {
                Format::Json | Format::Dot => serde_json::to_string_pretty(&json!({
                    "var": var,
                    "seed": seed,
                    "expansion": expansion,
                    "den_vector": expansion.den_vector(),
                }))?,
                Format::Table => format!("{expansion}"),
            };
            emit(&common, &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { which } => run_check(which),
        Command::Rank2 { r, depth, common } => {
            if depth == 0 {
                bail!("depth must be at least 1");
            }
            let chain = enumerate_chain(r, depth).map_err(|e| anyhow!("{e}"))?;
            let rendered = match common.format {
                Format::Json | Format::Dot => rank2_json(&chain)?,
                Format::Table => rank2_table(&chain),
            };
            emit(&common, &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_check(which: CheckKind) -> Result<ExitCode> {
    let (report, common, replay) = match which {
        CheckKind::Conjecture3 {
            quiver,
            common,
            replay,
        } => {
            let atlas = build_atlas(&quiver, &common)?;
            (verify_conjecture3(&atlas)?, common, replay)
        }
        CheckKind::Conjecture4 {
            quiver,
            common,
            replay,
        } => {
            let atlas = build_atlas(&quiver, &common)?;
            (verify_conjecture4(&atlas)?, common, replay)
        }
        CheckKind::Lemma21 {
            quiver,
            common,
            replay,
        } => {
            let atlas = build_atlas(&quiver, &common)?;
            (verify_lemma21(&atlas)?, common, replay)
        }
        CheckKind::Unistructural {
            quiver,
            common,
            replay,
            bound,
            budget,
        } => {
            let atlas = build_atlas(&quiver, &common)?;
            let bound = bound.unwrap_or_else(|| default_bound(&atlas));
            let (_, report) =
                unistructural_search(&atlas, bound, &SearchBudget { max_steps: budget })?;
            (report, common, replay)
        }
        CheckKind::Theorem1 {
            quiver,
            common,
            replay,
            budget,
        } => {
            let atlas = build_atlas(&quiver, &common)?;
            let (_, report) = verify_theorem1(&atlas, &SearchBudget { max_steps: budget })?;
            (report, common, replay)
        }
    };

    let rendered = render_report(&report, &replay)?;
    emit(&common, &rendered)?;
    Ok(check_exit_code(&report))
}

/// A check that ran to completion exits 0 when clean, 1 when it found
/// violations. (Failures to run at all surface as errors and exit 2.)
fn check_exit_code(report: &CheckReport) -> ExitCode {
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Candidate-matrix bound when none is given: one more than the largest
/// multiplicity seen anywhere in the atlas.
fn default_bound(atlas: &ExchangeAtlas) -> i32 {
    let observed = atlas
        .seeds()
        .iter()
        .flat_map(|s| s.matrix.rows().iter().flatten())
        .map(|&x| x.abs())
        .max()
        .unwrap_or(1);
    observed + 1
}

fn build_atlas(source: &QuiverSource, common: &CommonArgs) -> Result<ExchangeAtlas> {
    let matrix = load_matrix(source)?;
    if !matrix.is_connected() {
        eprintln!("note: the quiver is disconnected; proceeding anyway");
    }
    if common.max_seeds == 0 || common.max_depth == 0 {
        bail!("--max-seeds and --max-depth must be positive");
    }
    let limits = EnumerationLimits {
        max_seeds: common.max_seeds,
        max_depth: common.max_depth,
    };
    let workers = effective_workers(common)?;
    let atlas = if workers == 1 {
        enumerate(&matrix, &limits)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .context("building the worker pool")?;
        pool.install(|| enumerate(&matrix, &limits))?
    };
    Ok(atlas)
}

fn load_matrix(source: &QuiverSource) -> Result<BMatrix> {
    if let Some(name) = &source.preset {
        return preset(name).ok_or_else(|| {
            anyhow!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            )
        });
    }
    let path = source
        .quiver
        .as_ref()
        .expect("clap enforces exactly one quiver source");
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading quiver file {}", path.display()))?;
    Ok(load_quiver_json(&text)?)
}

fn effective_workers(common: &CommonArgs) -> Result<usize> {
    let workers = match common.workers {
        Some(w) => w,
        None => match std::env::var("CLUSTER_ATLAS_WORKERS") {
            Ok(value) => value
                .parse()
                .with_context(|| format!("CLUSTER_ATLAS_WORKERS={value:?} is not a number"))?,
            Err(_) => 1,
        },
    };
    if workers == 0 {
        bail!("worker count must be positive");
    }
    Ok(workers)
}

fn render_report(report: &CheckReport, replay: &ReplayArgs) -> Result<String> {
    let mut value: serde_json::Value = serde_json::from_str(&report.to_json())?;
    if let Some(seed) = replay.seed {
        value["parameters"]["seed"] = json!(seed);
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

fn emit(common: &CommonArgs, rendered: &str) -> Result<()> {
    match &common.out {
        Some(path) => {
            fs::write(path, format!("{rendered}\n"))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{rendered}"),
    }
    Ok(())
}

fn atlas_summary(atlas: &ExchangeAtlas) -> String {
    format!(
        "status: {:?}\nseeds: {}\nvariables: {}\nclusters: {}\nedges: {}",
        atlas.status(),
        atlas.seeds().len(),
        atlas.variables().len(),
        atlas.clusters().len(),
        atlas.undirected_edges().len(),
    )
}

fn variables_json(atlas: &ExchangeAtlas) -> String {
    let rows: Vec<serde_json::Value> = atlas
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            json!({
                "index": i,
                "den_vector": v.den_vector(),
                "poly": v,
                "display": v.to_string(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "variables": rows })).expect("serialization")
}

fn variables_table(atlas: &ExchangeAtlas) -> String {
    let mut out = String::from("index  den_vector  variable\n");
    for (i, v) in atlas.variables().iter().enumerate() {
        out.push_str(&format!("{i:<6} {:<11} {v}\n", v.den_vector().to_string()));
    }
    out.pop();
    out
}

fn rank2_json(chain: &cluster_atlas::rank2::Rank2Chain) -> Result<String> {
    let variables: Vec<serde_json::Value> = chain
        .window()
        .iter()
        .map(|(m, v)| {
            json!({
                "m": m,
                "poly": v,
                "den_vector": v.den_vector(),
                "display": v.to_string(),
            })
        })
        .collect();
    let special: Vec<i64> = chain.special_variables().iter().map(|(m, _)| *m).collect();
    Ok(serde_json::to_string_pretty(&json!({
        "r": chain.r(),
        "depth": chain.depth(),
        "period": chain.period(),
        "variables": variables,
        "special": special,
        "clusters_containing_x1": chain.clusters_containing_x1(),
    }))?)
}

fn rank2_table(chain: &cluster_atlas::rank2::Rank2Chain) -> String {
    let mut out = format!(
        "r = {}, depth = {}, period = {:?}\n",
        chain.r(),
        chain.depth(),
        chain.period()
    );
    for (m, v) in chain.window() {
        out.push_str(&format!("x[{m}]  den {}  {v}\n", v.den_vector()));
    }
    let special: Vec<String> = chain
        .special_variables()
        .iter()
        .map(|(m, _)| format!("x[{m}]"))
        .collect();
    out.push_str(&format!("special: {}\n", special.join(", ")));
    out.push_str(&format!(
        "clusters containing x1: {}",
        chain.clusters_containing_x1()
    ));
    out
}
