//! Experiment specs (config file), provider selection, and the
//! multi-scheduler orchestration that shares one world across all
//! requested schedulers.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LectorError, Result};
use crate::metrics::{comparison_table, report_for, ComparisonRow, SchedulerReport, DEFAULT_KAPPA};
use crate::schedulers::{SchedulerConstants, SchedulerEngine, SchedulingBounds};
use crate::semantics::{
    LlmProvider, LlmSettings, OfflineProvider, SimilarityCache, SimilarityProvider,
};
use crate::sim::{
    generate_concepts, run_with_world, EnvironmentParams, SimulationOutcome, World,
};
use crate::types::{ProviderKind, SchedulerId, SimulationConfig};

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

/// Environment dynamics plus cross-module constants that ride along in
/// the same override block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvironmentOverrides {
    #[serde(flatten)]
    pub env: EnvironmentParams,
    /// Efficiency-score weighting constant.
    pub metrics_kappa: f64,
}

impl Default for EnvironmentOverrides {
    fn default() -> Self {
        Self {
            env: EnvironmentParams::default(),
            metrics_kappa: default_kappa(),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// One experiment: a simulation config plus constant overrides and output
/// options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub scheduler_overrides: SchedulerConstants,
    #[serde(default)]
    pub environment_overrides: EnvironmentOverrides,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub plot: bool,
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| LectorError::Config(format!("cannot read {}: {e}", path.display())))?;
        let spec: ExperimentSpec = serde_json::from_str(&raw)
            .map_err(|e| LectorError::Config(format!("invalid config {}: {e}", path.display())))?;
        spec.simulation.validate()?;
        Ok(spec)
    }
}

/// Builds the provider matching the config, generating the pool as needed
/// for the offline provider's identity digest.
pub fn provider_for(cfg: &SimulationConfig) -> Result<Box<dyn SimilarityProvider>> {
    match cfg.provider {
        ProviderKind::Offline => {
            let pool = generate_concepts(cfg)?;
            Ok(Box::new(OfflineProvider::for_pool(&pool)))
        }
        ProviderKind::Llm => {
            let settings = LlmSettings::from_env()?;
            Ok(Box::new(LlmProvider::from_settings(&settings)))
        }
    }
}

pub struct SchedulerRun {
    pub scheduler_id: SchedulerId,
    pub outcome: SimulationOutcome,
    pub report: SchedulerReport,
}

pub struct ExperimentResult {
    pub runs: Vec<SchedulerRun>,
    pub table: Vec<ComparisonRow>,
}

/// Runs every requested scheduler against one shared world.
pub fn run_experiment(
    spec: &ExperimentSpec,
    jobs: usize,
    provider: &dyn SimilarityProvider,
    cache: &SimilarityCache,
) -> Result<ExperimentResult> {
    let cfg = &spec.simulation;
    let constants = Arc::new(spec.scheduler_overrides.clone());
    let env = &spec.environment_overrides.env;
    let kappa = spec.environment_overrides.metrics_kappa;
    let world = World::generate(cfg, env, constants.lector.lambda, provider, cache)?;
    let bounds = SchedulingBounds::from(cfg);

    let mut runs = Vec::new();
    for &scheduler_id in &cfg.scheduler_ids {
        let engine = SchedulerEngine::new(scheduler_id, constants.clone(), bounds)?;
        let outcome = run_with_world(cfg, env, &engine, &world, &world.matrix, jobs)?;
        if let Some(reason) = &outcome.abort {
            return Err(LectorError::Scheduler(reason.clone()));
        }
        let report = report_for(scheduler_id, &outcome.log, kappa)?;
        runs.push(SchedulerRun {
            scheduler_id,
            outcome,
            report,
        });
    }
    let table = comparison_table(&runs.iter().map(|r| r.report.clone()).collect::<Vec<_>>())?;
    Ok(ExperimentResult { runs, table })
}
