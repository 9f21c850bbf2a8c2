//! The seven schedulers behind one interface: given a learning state and a
//! review outcome, produce the updated state, updated profile, and the next
//! interval. All operations are pure functions of their arguments; the
//! SSP-MMC policy table is solved once at engine construction and shared
//! read-only afterwards.

pub mod anki;
pub mod constants;
pub mod fsrs;
pub mod hlr;
pub mod lector;
pub mod sm2;
pub mod sspmmc;
pub mod threshold;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use constants::SchedulerConstants;
pub use hlr::ReviewCounts;
pub use lector::{IntervalFactors, RetentionParams};
pub use sspmmc::PolicyTable;

use crate::error::Result;
use crate::types::{LearnerProfile, LearningState, SchedulerId, SimulationConfig};

/// Interval clamp bounds plus the recall level schedulers aim for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulingBounds {
    pub min_interval: f64,
    pub max_interval: f64,
    pub target_recall: f64,
}

impl Default for SchedulingBounds {
    fn default() -> Self {
        Self {
            min_interval: 1.0,
            max_interval: 365.0,
            target_recall: 0.9,
        }
    }
}

impl From<&SimulationConfig> for SchedulingBounds {
    fn from(cfg: &SimulationConfig) -> Self {
        Self {
            min_interval: cfg.min_interval,
            max_interval: cfg.max_interval,
            target_recall: cfg.target_recall,
        }
    }
}

pub(crate) fn clamp_interval(raw: f64, bounds: &SchedulingBounds) -> f64 {
    raw.clamp(bounds.min_interval, bounds.max_interval)
}

/// Outcome of one scheduling step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerDecision {
    /// Days until the next review, within [min_interval, max_interval].
    pub next_interval: f64,
    pub updated_state: LearningState,
    /// Unchanged for every scheduler except LECTOR.
    pub updated_profile: LearnerProfile,
    /// Factor breakdown for inspection (I_base, F1..F4, ease, ...).
    pub diagnostics: BTreeMap<String, f64>,
}

/// Everything a scheduler may need to know about one review.
#[derive(Debug, Clone, Copy)]
pub struct ReviewContext {
    pub outcome: bool,
    /// Day index of this review.
    pub day: u32,
    /// Days elapsed since the previous review (0 on first exposure).
    pub dt: f64,
    /// Interference pressure against recently reviewed concepts.
    pub pressure: f64,
    /// Success/failure counts before this review.
    pub history: ReviewCounts,
    /// Trailing-window means of (success, speed, retention, pressure)
    /// including this review; feeds LECTOR's profile EMA.
    pub recent: [f64; 4],
}

/// Binary outcome mapping: SM-2 sees quality 5 on success and 2 on failure.
pub const SM2_SUCCESS_QUALITY: u8 = 5;
pub const SM2_FAILURE_QUALITY: u8 = 2;
/// Binary outcome mapping: FSRS sees rating 3 on success and 1 on failure.
pub const FSRS_SUCCESS_RATING: u8 = 3;
pub const FSRS_FAILURE_RATING: u8 = 1;

/// One scheduler, ready to review: id + constants + solved policy table
/// where needed.
#[derive(Clone)]
pub struct SchedulerEngine {
    id: SchedulerId,
    constants: Arc<SchedulerConstants>,
    bounds: SchedulingBounds,
    policy: Option<Arc<PolicyTable>>,
}

impl SchedulerEngine {
    pub fn new(
        id: SchedulerId,
        constants: Arc<SchedulerConstants>,
        bounds: SchedulingBounds,
    ) -> Result<Self> {
        let policy = match id {
            SchedulerId::SspMmc => Some(Arc::new(sspmmc::sspmmc_policy(&constants.sspmmc)?)),
            _ => None,
        };
        Ok(Self {
            id,
            constants,
            bounds,
            policy,
        })
    }

    pub fn id(&self) -> SchedulerId {
        self.id
    }

    pub fn bounds(&self) -> &SchedulingBounds {
        &self.bounds
    }

    pub fn constants(&self) -> &SchedulerConstants {
        &self.constants
    }

    pub fn policy(&self) -> Option<&PolicyTable> {
        self.policy.as_deref()
    }

    /// The scheduler's own recall prediction for a review `dt` days after
    /// the last one, from the pre-review state.
    pub fn predict_recall(
        &self,
        state: &LearningState,
        profile: &LearnerProfile,
        pressure: f64,
        dt: f64,
    ) -> f64 {
        match self.id {
            SchedulerId::Lector => {
                let params = lector::lector_params(state, profile, pressure, &self.constants.lector);
                lector::lector_retention(dt.max(0.0), &params).unwrap_or(0.0)
            }
            SchedulerId::Hlr => hlr::hlr_recall(state.half_life, dt),
            SchedulerId::Fsrs => fsrs::fsrs_recall(state.half_life, dt),
            // Exponential curve over whatever the scheduler keeps in the
            // half-life slot (a true half-life for threshold/sspmmc, the
            // current interval for sm2/anki).
            SchedulerId::Sm2 | SchedulerId::Anki | SchedulerId::Threshold | SchedulerId::SspMmc => {
                (-dt / state.half_life).exp()
            }
        }
    }

    /// Applies one review and returns the decision.
    pub fn review(
        &self,
        state: &LearningState,
        profile: &LearnerProfile,
        ctx: &ReviewContext,
    ) -> Result<SchedulerDecision> {
        match self.id {
            SchedulerId::Lector => Ok(lector::lector_update(
                state,
                profile,
                ctx.outcome,
                ctx.pressure,
                &ctx.recent,
                &self.constants.lector,
                &self.bounds,
                ctx.day,
            )),
            SchedulerId::Sm2 => {
                let quality = if ctx.outcome {
                    SM2_SUCCESS_QUALITY
                } else {
                    SM2_FAILURE_QUALITY
                };
                sm2::sm2_update(state, profile, quality, &self.constants.sm2, &self.bounds, ctx.day)
            }
            SchedulerId::Hlr => Ok(hlr::hlr_update(
                state,
                profile,
                ctx.outcome,
                ctx.history,
                &self.constants.hlr,
                &self.bounds,
                ctx.day,
            )),
            SchedulerId::Fsrs => {
                let rating = if ctx.outcome {
                    FSRS_SUCCESS_RATING
                } else {
                    FSRS_FAILURE_RATING
                };
                fsrs::fsrs_update(state, profile, rating, &self.constants.fsrs, &self.bounds, ctx.day)
            }
            SchedulerId::Anki => Ok(anki::anki_update(
                state,
                profile,
                ctx.outcome,
                &self.constants.anki,
                &self.bounds,
                ctx.day,
            )),
            SchedulerId::Threshold => Ok(threshold::threshold_update(
                state,
                profile,
                ctx.outcome,
                &self.constants.threshold,
                &self.bounds,
                ctx.day,
            )),
            SchedulerId::SspMmc => {
                let policy = self.policy.as_ref().expect("policy solved at construction");
                Ok(sspmmc::sspmmc_update(
                    state,
                    profile,
                    ctx.outcome,
                    policy,
                    &self.bounds,
                    ctx.day,
                ))
            }
        }
    }
}
