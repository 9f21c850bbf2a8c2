//! The four evaluation metrics and the cross-scheduler comparison table:
//! success rate, efficiency score (kappa * SR * avg interval), average
//! interval, and learning burden (total attempts).

use serde::{Deserialize, Serialize};

use crate::error::{LectorError, Result};
use crate::sim::EventLog;
use crate::types::SchedulerId;

/// Efficiency weighting constant. The published comparison figures are
/// consistent with SR * AI scaled by 0.8 (e.g. 0.884 * 6.25 * 0.8 = 4.42).
pub const DEFAULT_KAPPA: f64 = 0.8;

/// Aggregate metrics for one scheduler over one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerReport {
    pub scheduler_id: SchedulerId,
    pub success_rate: f64,
    pub efficiency_score: f64,
    pub avg_interval: f64,
    pub total_attempts: u64,
}

pub fn success_rate(log: &EventLog) -> Result<f64> {
    if log.events.is_empty() {
        return Err(LectorError::EmptyLog);
    }
    let successes = log.events.iter().filter(|e| e.success).count();
    Ok(successes as f64 / log.events.len() as f64)
}

pub fn avg_interval(log: &EventLog) -> Result<f64> {
    if log.events.is_empty() {
        return Err(LectorError::EmptyLog);
    }
    let total: f64 = log.events.iter().map(|e| e.scheduled_interval).sum();
    Ok(total / log.events.len() as f64)
}

/// kappa * success_rate * avg_interval.
pub fn efficiency_score(success_rate: f64, avg_interval: f64, kappa: f64) -> f64 {
    kappa * success_rate * avg_interval
}

/// Total review attempts.
pub fn learning_burden(log: &EventLog) -> u64 {
    log.events.len() as u64
}

pub fn report_for(scheduler_id: SchedulerId, log: &EventLog, kappa: f64) -> Result<SchedulerReport> {
    let sr = success_rate(log)?;
    let ai = avg_interval(log)?;
    Ok(SchedulerReport {
        scheduler_id,
        success_rate: sr,
        efficiency_score: efficiency_score(sr, ai, kappa),
        avg_interval: ai,
        total_attempts: learning_burden(log),
    })
}

/// One comparison row; the top row carries its improvement over the
/// runner-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    #[serde(flatten)]
    pub report: SchedulerReport,
    pub rank: usize,
    /// (first - second) / second on success rate; top row only.
    pub relative_improvement: Option<f64>,
    /// first - second in percentage points; top row only.
    pub point_improvement: Option<f64>,
}

/// Ranks reports by success rate (ties by efficiency score) and computes
/// the winner's margin over the best non-first row.
pub fn comparison_table(reports: &[SchedulerReport]) -> Result<Vec<ComparisonRow>> {
    if reports.is_empty() {
        return Err(LectorError::EmptyLog);
    }
    let mut seen = std::collections::HashSet::new();
    for r in reports {
        if !seen.insert(r.scheduler_id) {
            return Err(LectorError::DuplicateScheduler(
                r.scheduler_id.to_string(),
            ));
        }
    }
    let mut sorted: Vec<SchedulerReport> = reports.to_vec();
    sorted.sort_by(|a, b| {
        (b.success_rate, b.efficiency_score)
            .partial_cmp(&(a.success_rate, a.efficiency_score))
            .expect("metrics are finite")
    });
    let runner_up = sorted.get(1).map(|r| r.success_rate);
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, report)| {
            let (relative, points) = if i == 0 {
                match runner_up {
                    Some(second) if second > 0.0 => (
                        Some((report.success_rate - second) / second),
                        Some(report.success_rate - second),
                    ),
                    Some(second) => (None, Some(report.success_rate - second)),
                    None => (None, None),
                }
            } else {
                (None, None)
            };
            ComparisonRow {
                report,
                rank: i + 1,
                relative_improvement: relative,
                point_improvement: points,
            }
        })
        .collect())
}
