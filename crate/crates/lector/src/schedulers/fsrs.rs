//! Reduced two-parameter FSRS variant tracking stability and difficulty
//! only (labeled "fsrs-simplified" in every output). Stability lives in
//! the `half_life` slot and the mutable difficulty in the `difficulty`
//! slot; intervals target 90% retention of a 0.9^(t/S) curve.

use std::collections::BTreeMap;

use crate::error::{LectorError, Result};
use crate::schedulers::constants::FsrsConstants;
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{clamp01, LearnerProfile, LearningState};

/// Modeled recall after `dt` days at stability `s`: 0.9^(dt/s).
pub fn fsrs_recall(stability: f64, dt: f64) -> f64 {
    (0.9f64.ln() * dt / stability).exp()
}

pub fn fsrs_update(
    state: &LearningState,
    profile: &LearnerProfile,
    rating: u8,
    consts: &FsrsConstants,
    bounds: &SchedulingBounds,
    day: u32,
) -> Result<SchedulerDecision> {
    if !(1..=4).contains(&rating) {
        return Err(LectorError::Scheduler(format!(
            "FSRS rating {rating} outside 1..4"
        )));
    }
    let stability = state.half_life;
    let difficulty = state.difficulty;

    let new_stability = if rating > 1 {
        let gain = 0.5f64.exp()
            * (11.0 - 10.0 * difficulty)
            * stability.powf(consts.stability_power)
            * consts.weight
            * (f64::from(rating) - 2.5 + 1.0);
        stability * (1.0 + gain)
    } else {
        (consts.failure_shrink * stability.powf(consts.failure_power)).max(consts.stability_floor)
    };
    let new_difficulty = clamp01(difficulty + consts.difficulty_scale * (3.0 - f64::from(rating)) / 2.0);

    let raw = new_stability * bounds.target_recall.ln() / 0.9f64.ln();
    let next_interval = clamp_interval(raw, bounds);

    let mut next = *state;
    next.half_life = new_stability;
    next.difficulty = new_difficulty;
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("stability".to_owned(), new_stability);
    diagnostics.insert("difficulty".to_owned(), new_difficulty);
    diagnostics.insert("raw_interval".to_owned(), raw);

    Ok(SchedulerDecision {
        next_interval,
        updated_state: next,
        updated_profile: *profile,
        diagnostics,
    })
}
