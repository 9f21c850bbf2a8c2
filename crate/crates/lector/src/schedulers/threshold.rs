//! Threshold baseline: double the half-life on success, halve on failure
//! (floor 1 day), and review when exp(-dt/h) decays to a fixed threshold.

use std::collections::BTreeMap;

use crate::schedulers::constants::ThresholdConstants;
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{LearnerProfile, LearningState};

/// The dt at which exp(-dt/h) = threshold.
pub fn threshold_interval(half_life: f64, threshold: f64) -> f64 {
    -half_life * threshold.ln()
}

pub fn threshold_update(
    state: &LearningState,
    profile: &LearnerProfile,
    outcome: bool,
    consts: &ThresholdConstants,
    bounds: &SchedulingBounds,
    day: u32,
) -> SchedulerDecision {
    let half_life = if outcome {
        state.half_life * consts.growth
    } else {
        (state.half_life * consts.shrink).max(consts.half_life_floor)
    };
    let raw = threshold_interval(half_life, consts.recall_threshold);
    let next_interval = clamp_interval(raw, bounds);

    let mut next = *state;
    next.half_life = half_life;
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("half_life".to_owned(), half_life);
    diagnostics.insert("raw_interval".to_owned(), raw);

    SchedulerDecision {
        next_interval,
        updated_state: next,
        updated_profile: *profile,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_analytics() {
        assert!((threshold_interval(1.0, 0.7) - 0.3567).abs() < 1e-4);
        assert!((threshold_interval(10.0, 0.7) - 3.567).abs() < 1e-3);
    }

    #[test]
    fn short_half_life_clamps_to_floor_interval() {
        let d = threshold_update(
            &LearningState::initial(0.5),
            &LearnerProfile::neutral(0.2),
            false,
            &ThresholdConstants::default(),
            &SchedulingBounds::default(),
            0,
        );
        assert_eq!(d.updated_state.half_life, 1.0);
        assert_eq!(d.next_interval, 1.0);
    }

    #[test]
    fn two_successes_quadruple_half_life() {
        let consts = ThresholdConstants::default();
        let bounds = SchedulingBounds::default();
        let profile = LearnerProfile::neutral(0.2);
        let mut state = LearningState::initial(0.5);
        for day in 0..2 {
            state = threshold_update(&state, &profile, true, &consts, &bounds, day).updated_state;
        }
        assert_eq!(state.half_life, 4.0);
        assert!(crate::types::validate_state(&state).is_empty());
    }
}
