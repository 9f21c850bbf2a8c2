//! File outputs: event CSVs, run manifests, the comparison table, the
//! interference matrix CSV, and the most-confusable-pairs listing.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::metrics::ComparisonRow;
use crate::semantics::InterferenceMatrix;
use crate::sim::EventLog;
use crate::types::{ConceptId, SchedulerId, SimulationConfig};

/// CSV row schema for event logs:
/// day,learner_id,concept_id,scheduler,interval,predicted_recall,success
#[derive(Serialize)]
struct EventRow<'a> {
    day: u32,
    learner_id: &'a str,
    concept_id: &'a str,
    scheduler: &'a str,
    interval: f64,
    predicted_recall: f64,
    success: bool,
}

pub fn write_events_csv(path: &Path, log: &EventLog) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for e in &log.events {
        writer.serialize(EventRow {
            day: e.day,
            learner_id: e.learner_id.as_str(),
            concept_id: e.concept_id.as_str(),
            scheduler: e.scheduler_id.as_str(),
            interval: e.scheduled_interval,
            predicted_recall: e.predicted_recall,
            success: e.success,
        })?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a SimulationConfig,
    seed: u64,
    scheduler: &'a str,
    git_describe: String,
    config_hash: &'a str,
    created_at_unix: u64,
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_owned())
        .unwrap_or_else(|| "unknown".to_owned())
}

pub fn write_manifest(
    path: &Path,
    cfg: &SimulationConfig,
    scheduler: SchedulerId,
    config_hash: &str,
) -> Result<()> {
    let manifest = Manifest {
        config: cfg,
        seed: cfg.seed,
        scheduler: scheduler.as_str(),
        git_describe: git_describe(),
        config_hash,
        created_at_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

/// Comparison CSV in the published column order:
/// algorithm,success_rate,efficiency_score,avg_interval,total_attempts
#[derive(Serialize)]
struct ComparisonCsvRow<'a> {
    algorithm: &'a str,
    success_rate: f64,
    efficiency_score: f64,
    avg_interval: f64,
    total_attempts: u64,
}

pub fn write_comparison_csv(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(ComparisonCsvRow {
            algorithm: row.report.scheduler_id.as_str(),
            success_rate: row.report.success_rate,
            efficiency_score: row.report.efficiency_score,
            avg_interval: row.report.avg_interval,
            total_attempts: row.report.total_attempts,
        })?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_comparison_json(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(rows)?)?;
    Ok(())
}

/// Full matrix with a header row and column of concept ids.
pub fn write_matrix_csv(path: &Path, matrix: &InterferenceMatrix) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path)?;
    let mut header = vec!["concept_id".to_owned()];
    header.extend(matrix.concept_ids.iter().map(|c| c.to_string()));
    writer.write_record(&header)?;
    for (i, id) in matrix.concept_ids.iter().enumerate() {
        let mut record = vec![id.to_string()];
        record.extend(matrix.entries[i].iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// The `limit` highest off-diagonal entries, descending, ties broken by id
/// pair for determinism.
pub fn top_pairs(
    matrix: &InterferenceMatrix,
    limit: usize,
) -> Vec<(ConceptId, ConceptId, f64)> {
    let n = matrix.len();
    let mut pairs = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((
                matrix.concept_ids[i].clone(),
                matrix.concept_ids[j].clone(),
                matrix.entry(i, j),
            ));
        }
    }
    pairs.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("entries are finite")
            .then_with(|| (&a.0, &a.1).cmp(&(&b.0, &b.1)))
    });
    pairs.truncate(limit);
    pairs
}

pub fn write_top_pairs(path: &Path, pairs: &[(ConceptId, ConceptId, f64)]) -> Result<()> {
    let mut out = String::from("rank\tconcept_a\tconcept_b\tsimilarity\n");
    for (rank, (a, b, v)) in pairs.iter().enumerate() {
        out.push_str(&format!("{}\t{a}\t{b}\t{v}\n", rank + 1));
    }
    std::fs::write(path, out)?;
    Ok(())
}
