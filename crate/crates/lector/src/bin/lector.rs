//! Batch experiment front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 provider failure,
//! 4 scheduler error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lector::error::LectorError;
use lector::experiment::{provider_for, run_experiment, ExperimentSpec};
use lector::output::{
    top_pairs, write_comparison_csv, write_comparison_json, write_events_csv, write_manifest,
    write_matrix_csv, write_top_pairs,
};
use lector::plot::write_metric_charts;
use lector::semantics::{
    build_matrix, CacheStats, LlmProvider, LlmSettings, OfflineProvider, SimilarityCache,
    SimilarityProvider,
};
use lector::types::{ConceptPool, ProviderKind, SchedulerId};

const EXIT_CONFIG: u8 = 2;
const EXIT_PROVIDER: u8 = 3;
const EXIT_SCHEDULER: u8 = 4;

const ENV_CACHE_PATH: &str = "LECTOR_CACHE_PATH";

#[derive(Parser)]
#[command(name = "lector", version, about = "Spaced-repetition scheduling benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation benchmark described by a config file.
    Simulate {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Override the config file's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: machine parallelism).
        #[arg(long)]
        jobs: Option<usize>,
        /// Comma-separated scheduler subset to run.
        #[arg(long, value_delimiter = ',')]
        schedulers: Option<Vec<String>>,
        /// Also write SVG bar charts per metric.
        #[arg(long)]
        plot: bool,
    },
    /// Build the full interference matrix for a concept pool file.
    Matrix {
        /// Concept pool (JSON).
        #[arg(long)]
        pool: PathBuf,
        #[arg(long, default_value = "offline")]
        provider: String,
        /// Print cache counters after the build.
        #[arg(long)]
        stats: bool,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Inspect or clear the similarity cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Print entry count and last-run hit/miss counters.
    Stats,
    /// Truncate the cache file.
    Clear,
}

fn exit_code_for(err: &LectorError) -> u8 {
    match err {
        LectorError::Transport(_) | LectorError::SimilarityUnavailable { .. } => EXIT_PROVIDER,
        LectorError::Scheduler(_) | LectorError::NonConvergence { .. } => EXIT_SCHEDULER,
        _ => EXIT_CONFIG,
    }
}

fn cache_path_from_env(default: &Path) -> PathBuf {
    std::env::var_os(ENV_CACHE_PATH)
        .map(PathBuf::from)
        .unwrap_or_else(|| default.to_path_buf())
}

fn stats_sidecar(cache_path: &Path) -> PathBuf {
    let mut name = cache_path.file_name().unwrap_or_default().to_os_string();
    name.push(".stats.json");
    cache_path.with_file_name(name)
}

fn write_stats_sidecar(cache: &SimilarityCache) -> Result<(), LectorError> {
    if let Some(path) = cache.path() {
        std::fs::write(
            stats_sidecar(path),
            serde_json::to_string_pretty(&cache.stats())?,
        )?;
    }
    Ok(())
}

fn cmd_simulate(
    config: &Path,
    seed: Option<u64>,
    jobs: Option<usize>,
    schedulers: Option<Vec<String>>,
    plot: bool,
) -> Result<(), LectorError> {
    let mut spec = ExperimentSpec::load(config)?;
    if let Some(seed) = seed {
        spec.simulation.seed = seed;
    }
    if let Some(names) = schedulers {
        let ids = names
            .iter()
            .map(|s| s.parse::<SchedulerId>())
            .collect::<Result<Vec<_>, _>>()?;
        spec.simulation.scheduler_ids = ids;
    }
    if plot {
        spec.plot = true;
    }
    spec.simulation.validate()?;
    let jobs = jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);

    std::fs::create_dir_all(&spec.output_dir)?;
    let cache_path = cache_path_from_env(&spec.output_dir.join("similarity_cache.jsonl"));
    let cache = SimilarityCache::open(&cache_path)?;
    let provider = provider_for(&spec.simulation)?;

    let result = run_experiment(&spec, jobs, provider.as_ref(), &cache)?;

    for run in &result.runs {
        let stem = run.scheduler_id.as_str();
        write_events_csv(
            &spec.output_dir.join(format!("events_{stem}.csv")),
            &run.outcome.log,
        )?;
        write_manifest(
            &spec.output_dir.join(format!("manifest_{stem}.json")),
            &spec.simulation,
            run.scheduler_id,
            &run.outcome.log.config_hash,
        )?;
    }
    write_comparison_csv(&spec.output_dir.join("comparison.csv"), &result.table)?;
    write_comparison_json(&spec.output_dir.join("comparison.json"), &result.table)?;
    if spec.plot {
        write_metric_charts(&spec.output_dir.join("plots"), &result.table)?;
    }
    write_stats_sidecar(&cache)?;

    for row in &result.table {
        println!(
            "{:<18} success_rate={:.4} efficiency={:.3} avg_interval={:.3} attempts={}",
            row.report.scheduler_id.as_str(),
            row.report.success_rate,
            row.report.efficiency_score,
            row.report.avg_interval,
            row.report.total_attempts
        );
    }
    Ok(())
}

fn cmd_matrix(pool: &Path, provider: &str, stats: bool, out: &Path) -> Result<(), LectorError> {
    let pool = ConceptPool::load(pool)?;
    let kind = match provider {
        "offline" => ProviderKind::Offline,
        "llm" => ProviderKind::Llm,
        other => {
            return Err(LectorError::Config(format!(
                "unknown provider {other:?}; expected offline or llm"
            )))
        }
    };
    let provider: Box<dyn SimilarityProvider> = match kind {
        ProviderKind::Offline => Box::new(OfflineProvider::for_pool(&pool)),
        ProviderKind::Llm => Box::new(LlmProvider::from_settings(&LlmSettings::from_env()?)),
    };
    std::fs::create_dir_all(out)?;
    let cache_path = cache_path_from_env(Path::new("similarity_cache.jsonl"));
    let cache = SimilarityCache::open(&cache_path)?;

    let matrix = build_matrix(&pool.concepts, provider.as_ref(), &cache)?;
    write_matrix_csv(&out.join("matrix.csv"), &matrix)?;
    let pairs = top_pairs(&matrix, 10);
    write_top_pairs(&out.join("top_pairs.txt"), &pairs)?;
    write_stats_sidecar(&cache)?;

    println!(
        "matrix {}x{} written to {}",
        matrix.len(),
        matrix.len(),
        out.join("matrix.csv").display()
    );
    if stats {
        let s = cache.stats();
        println!(
            "cache stats: entries={} hits={} misses={} provider_calls={}",
            s.entries, s.hits, s.misses, s.provider_calls
        );
    }
    Ok(())
}

fn cmd_cache(action: &CacheAction) -> Result<(), LectorError> {
    let cache_path = cache_path_from_env(Path::new("similarity_cache.jsonl"));
    match action {
        CacheAction::Stats => {
            let entries = if cache_path.exists() {
                SimilarityCache::open(&cache_path)?.len()
            } else {
                0
            };
            println!("{entries} entries in {}", cache_path.display());
            let sidecar = stats_sidecar(&cache_path);
            if sidecar.exists() {
                let raw = std::fs::read_to_string(&sidecar)?;
                let stats: CacheStats = serde_json::from_str(&raw)?;
                println!(
                    "last run: hits={} misses={} provider_calls={}",
                    stats.hits, stats.misses, stats.provider_calls
                );
            }
        }
        CacheAction::Clear => {
            if cache_path.exists() {
                SimilarityCache::open(&cache_path)?.clear()?;
            }
            let sidecar = stats_sidecar(&cache_path);
            if sidecar.exists() {
                std::fs::remove_file(sidecar)?;
            }
            println!("cache cleared: {}", cache_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            config,
            seed,
            jobs,
            schedulers,
            plot,
        } => cmd_simulate(config, *seed, *jobs, schedulers.clone(), *plot),
        Command::Matrix {
            pool,
            provider,
            stats,
            out,
        } => cmd_matrix(pool, provider, *stats, out),
        Command::Cache { action } => cmd_cache(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
