//! `ldict`: desk-scale experiments for generic learned dictionaries.
//!
//! Every experiment writes CSV to `--out`, or to stdout when it is omitted.
//! Exit status is 0 on success, 2 when a result is infeasible or empty and
//! 1 on errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use learned_dict::bench::{self, DistSpec, SpaceGrid, SpaceStatus, StreamSpec, UpdateStream};
use learned_dict::dict::SplayTree;
use learned_dict::forest::ForestMode;
use learned_dict::workloads::{self, QueryWorkload};
use learned_dict::{DictKind, Execution, SortedKeySet};

#[derive(Debug, Parser)]
#[command(name = "ldict", version, about = "Benchmarks for generic learned sorted-set dictionaries")]
struct Cli {
    /// Run builds and batch work on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic key file.
    Gen(GenArgs),
    /// Generate a query file for a dataset.
    Queries(QueriesArgs),
    /// Draw a subsample whose CDF matches the dataset.
    Sample(SampleArgs),
    /// Binning sweep over bin-count percentages.
    BenchBoost(BoostArgs),
    /// Segmentation sweep over powers-of-two error bounds.
    BenchEpsilon(EpsilonArgs),
    /// Gap ratio against powers of ln n.
    Delta(DeltaArgs),
    /// Fastest configuration within space-overhead bounds.
    Space(SpaceArgs),
    /// Entropy-bounded search forests for k = 1..=k_max.
    Forest(ForestArgs),
    /// Replay an update stream through the dynamic dictionary.
    DynStream(StreamArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// `uniform` or `clustered`.
    #[arg(long, default_value = "uniform")]
    kind: String,
    #[arg(long, short)]
    n: usize,
    /// Universe size for uniform keys.
    #[arg(long, default_value_t = 1 << 44)]
    universe: u64,
    #[arg(long, default_value_t = 0.001)]
    outlier_fraction: f64,
    /// Width of the dense band for clustered keys.
    #[arg(long, default_value_t = 1 << 32)]
    spread: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct QueriesArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, short, default_value_t = 100_000)]
    m: usize,
    #[arg(long, default_value_t = 0.5)]
    hit_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    target: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Key file for the chosen sample.
    #[arg(long)]
    out: PathBuf,
    /// Per-trial KS and KL values as CSV.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Dataset, workload and timing options shared by the timing commands.
#[derive(Debug, Args)]
struct TimingArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Query file; generated from the dataset when omitted.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Number of generated queries.
    #[arg(long, short, default_value_t = 100_000)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value = "bbs,bfs,bfe,bft:8,is,css,splay")]
    dicts: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoostArgs {
    #[command(flatten)]
    timing: TimingArgs,
    /// Bin counts as percentages of n.
    #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_PERCENTAGES)]
    pcts: Vec<f64>,
}

#[derive(Debug, Args)]
struct EpsilonArgs {
    #[command(flatten)]
    timing: TimingArgs,
}

#[derive(Debug, Args)]
struct DeltaArgs {
    /// Key files to report on; may be repeated.
    #[arg(long)]
    dataset: Vec<PathBuf>,
    /// Sizes of generated dense uniform sets (universe 4n).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Generated sets per size.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[command(flatten)]
    timing: TimingArgs,
    /// Overhead bounds in percent of 8n.
    #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_BOUNDS)]
    bounds: Vec<f64>,
}

#[derive(Debug, Args)]
struct ForestArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// `uniform`, `hits`, `random` or `zipf[:S]`.
    #[arg(long, default_value = "uniform")]
    dist: String,
    #[arg(long, default_value_t = 16)]
    k_max: usize,
    /// `exact` or `approx`.
    #[arg(long, default_value = "exact")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// Key file with the initial set.
    #[arg(long)]
    initial: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    ops: usize,
    /// Insert, delete and search weights.
    #[arg(long, default_value = "1:1:2")]
    mix: String,
    /// Shrink the smallest gap on every insert instead.
    #[arg(long)]
    adversarial: bool,
    /// Bin count; defaults to the initial size.
    #[arg(long)]
    k: Option<usize>,
    /// Largest key drawn by the stream; defaults to max(n², last key).
    #[arg(long)]
    universe_max: Option<u64>,
    #[arg(long, default_value_t = 10)]
    phases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn dataset_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path) -> Result<SortedKeySet> {
    let loaded = workloads::load_keys(path).with_context(|| format!("loading {}", path.display()))?;
    if loaded.duplicates_removed > 0 {
        eprintln!("warning: {}: dropped {} duplicate keys", path.display(), loaded.duplicates_removed);
    }
    if loaded.keys.is_empty() {
        bail!("{}: no keys", path.display());
    }
    Ok(loaded.keys)
}

fn emit<T: Serialize>(rows: &[T], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => bench::write_csv_file(rows, p).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let stdout = std::io::stdout();
            bench::write_csv(rows, stdout.lock())?;
        }
    }
    Ok(())
}

fn status(empty: bool) -> ExitCode {
    if empty {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

struct Workload {
    id: String,
    keys: SortedKeySet,
    queries: Vec<u64>,
    kinds: Vec<DictKind>,
}

impl TimingArgs {
    fn prepare(&self) -> Result<Workload> {
        if self.repeats == 0 {
            bail!("--repeats must be at least 1");
        }
        let kinds = DictKind::parse_list(&self.dicts)?;
        if kinds.is_empty() {
            bail!("--dicts is empty; valid ids: {}", DictKind::VALID_IDS);
        }
        let keys = load(&self.dataset)?;
        let queries = match &self.queries {
            Some(p) => workloads::load_raw(p).with_context(|| format!("loading {}", p.display()))?,
            None => workloads::gen_queries(&keys, self.m, 0.5, self.seed)?.queries,
        };
        if queries.is_empty() {
            bail!("empty query workload");
        }
        Ok(Workload { id: dataset_id(&self.dataset), keys, queries, kinds })
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Gen(a) => {
            let keys = match a.kind.as_str() {
                "uniform" => workloads::gen_uniform(a.n, a.universe, a.seed)?,
                "clustered" => workloads::gen_clustered(a.n, a.outlier_fraction, a.spread, a.seed)?,
                other => bail!("unknown generator `{other}`; expected uniform or clustered"),
            };
            workloads::save_keys(&keys, &a.out)?;
            Ok(status(keys.is_empty()))
        }
        Command::Queries(a) => {
            let keys = load(&a.dataset)?;
            let QueryWorkload { queries, .. } = workloads::gen_queries(&keys, a.m, a.hit_fraction, a.seed)?;
            workloads::save_raw(&queries, &a.out)?;
            Ok(status(queries.is_empty()))
        }
        Command::Sample(a) => {
            let keys = load(&a.dataset)?;
            let (sample, diag) = workloads::subsample_matching_cdf(&keys, a.target, a.trials, a.seed, exec)?;
            workloads::save_keys(&sample, &a.out)?;
            if let Some(report) = &a.report {
                #[derive(Serialize)]
                struct Trial {
                    schema: u32,
                    trial: usize,
                    ks: f64,
                    ks_critical: f64,
                    kl: f64,
                    accepted: bool,
                    chosen: bool,
                }
                let rows: Vec<Trial> = diag
                    .records
                    .iter()
                    .enumerate()
                    .map(|(i, r)| Trial {
                        schema: bench::SCHEMA_VERSION,
                        trial: i,
                        ks: r.ks,
                        ks_critical: diag.ks_critical,
                        kl: r.kl,
                        accepted: r.accepted,
                        chosen: diag.chosen_trial == Some(i),
                    })
                    .collect();
                emit(&rows, Some(report))?;
            }
            eprintln!(
                "accepted {}/{} trials, chose trial {:?} with KL {:.3e}",
                diag.accepted, diag.trials, diag.chosen_trial, diag.chosen_kl
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::BenchBoost(a) => {
            let w = a.timing.prepare()?;
            let rows = bench::bench_boost(&w.id, &w.keys, &w.kinds, &a.pcts, &w.queries, a.timing.repeats, exec)?;
            emit(&rows, a.timing.out.as_deref())?;
            Ok(status(rows.is_empty()))
        }
        Command::BenchEpsilon(a) => {
            let w = a.timing.prepare()?;
            let rows = bench::bench_epsilon(&w.id, &w.keys, &w.kinds, &w.queries, a.timing.repeats, exec)?;
            emit(&rows, a.timing.out.as_deref())?;
            Ok(status(rows.is_empty()))
        }
        Command::Delta(a) => {
            let mut sets: Vec<(String, SortedKeySet)> = Vec::new();
            for p in &a.dataset {
                let keys = workloads::load_keys(p).with_context(|| format!("loading {}", p.display()))?.keys;
                sets.push((dataset_id(p), keys));
            }
            for &n in &a.sizes {
                for s in 0..a.seeds {
                    let seed = a.seed + s;
                    sets.push((format!("uniform_{n}_s{seed}"), bench::dense_uniform(n, seed)?));
                }
            }
            if sets.is_empty() {
                bail!("nothing to report: pass --dataset or --sizes");
            }
            let rows = bench::delta_report(sets.iter().map(|(id, k)| (id.as_str(), k.as_slice())));
            for r in rows.iter().filter(|r| r.delta.is_none()) {
                eprintln!("warning: {}: {}", r.dataset_id, r.status);
            }
            emit(&rows, a.out.as_deref())?;
            Ok(status(rows.iter().all(|r| r.delta.is_none())))
        }
        Command::Space(a) => {
            let w = a.timing.prepare()?;
            let grid = SpaceGrid::powers_of_two(w.keys.len(), w.kinds.clone());
            let (rows, _) = bench::space_bounded(&w.id, &w.keys, &w.queries, &a.bounds, &grid, a.timing.repeats, exec)?;
            emit(&rows, a.timing.out.as_deref())?;
            Ok(status(rows.iter().any(|r| r.status == SpaceStatus::Infeasible)))
        }
        Command::Forest(a) => {
            let keys = load(&a.dataset)?;
            let spec: DistSpec = a.dist.parse()?;
            let mode: ForestMode = a.mode.parse()?;
            let dist = spec.build(keys.len(), a.seed)?;
            let rows =
                bench::forest_report(&dataset_id(&a.dataset), &keys, &dist, &spec.to_string(), a.k_max, mode, exec)?;
            emit(&rows, a.out.as_deref())?;
            Ok(status(rows.is_empty()))
        }
        Command::DynStream(a) => {
            let keys = load(&a.initial)?;
            let n = keys.len() as u64;
            let hi = a.universe_max.unwrap_or_else(|| n.saturating_mul(n).max(*keys.last().unwrap()));
            let spec = if a.adversarial { StreamSpec::Adversarial } else { a.mix.parse()? };
            let stream = UpdateStream::generate(&keys, a.ops, (0, hi), spec, a.seed)?;
            let k = a.k.unwrap_or(keys.len());
            let report = bench::run_stream::<SplayTree>(&keys, k, &stream, a.phases)?;
            emit(&report.rows, a.out.as_deref())?;
            Ok(status(report.rows.is_empty()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
