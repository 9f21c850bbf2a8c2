//! Half-life regression with fixed weights over sqrt-transformed
//! success/failure counts. The simulator supplies the prior counts; the
//! estimated half-life lands in the `half_life` slot.

use std::collections::BTreeMap;

use crate::schedulers::constants::HlrConstants;
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{LearnerProfile, LearningState};

/// Prior review history for one (learner, concept) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReviewCounts {
    pub right: u32,
    pub wrong: u32,
}

impl ReviewCounts {
    pub fn record(self, success: bool) -> Self {
        if success {
            Self {
                right: self.right + 1,
                ..self
            }
        } else {
            Self {
                wrong: self.wrong + 1,
                ..self
            }
        }
    }
}

/// h-hat = 2^(theta . x) with x = (sqrt(1+right), sqrt(1+wrong), 1).
pub fn hlr_half_life(counts: &ReviewCounts, consts: &HlrConstants) -> f64 {
    let exponent = consts.theta_right * (1.0 + f64::from(counts.right)).sqrt()
        + consts.theta_wrong * (1.0 + f64::from(counts.wrong)).sqrt()
        + consts.theta_bias;
    exponent.exp2()
}

/// Predicted recall after `dt` days under a base-2 forgetting curve.
pub fn hlr_recall(half_life: f64, dt: f64) -> f64 {
    (-dt / half_life).exp2()
}

pub fn hlr_update(
    state: &LearningState,
    profile: &LearnerProfile,
    outcome: bool,
    history: ReviewCounts,
    consts: &HlrConstants,
    bounds: &SchedulingBounds,
    day: u32,
) -> SchedulerDecision {
    let counts = history.record(outcome);
    let half_life = hlr_half_life(&counts, consts);
    // The dt at which 2^(-dt/h) falls to the target recall.
    let raw = -half_life * bounds.target_recall.log2();
    let next_interval = clamp_interval(raw, bounds);

    let mut next = *state;
    next.half_life = half_life;
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("half_life".to_owned(), half_life);
    diagnostics.insert("right".to_owned(), f64::from(counts.right));
    diagnostics.insert("wrong".to_owned(), f64::from(counts.wrong));
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
    fn empty_history_half_life_is_two_to_the_0_4() {
        // 2^(0.3 * 1 - 0.4 * 1 + 0.5) = 2^0.4
        let h = hlr_half_life(&ReviewCounts::default(), &HlrConstants::default());
        assert!((h - 1.3195).abs() < 1e-4);
        assert!((h - 0.4f64.exp2()).abs() < 1e-12);
    }

    #[test]
    fn interval_formula_at_target_recall() {
        // dt = -h * log2(0.9) with h = 10
        let raw = -10.0 * 0.9f64.log2();
        assert!((raw - 1.5200).abs() < 1e-4);
    }

    #[test]
    fn recall_at_one_half_life_is_half() {
        assert!((hlr_recall(7.3, 7.3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn update_folds_outcome_into_counts() {
        let consts = HlrConstants::default();
        let bounds = SchedulingBounds::default();
        let profile = LearnerProfile::neutral(0.2);
        let state = LearningState::initial(0.5);
        let history = ReviewCounts { right: 3, wrong: 1 };
        let d = hlr_update(&state, &profile, true, history, &consts, &bounds, 5);
        let expected = hlr_half_life(&ReviewCounts { right: 4, wrong: 1 }, &consts);
        assert_eq!(d.updated_state.half_life, expected);
        assert_eq!(d.diagnostics["right"], 4.0);
        assert_eq!(d.next_interval, 1.0); // small h-hat clamps to the floor
        assert!(crate::types::validate_state(&d.updated_state).is_empty());
    }

    #[test]
    fn successes_lengthen_failures_shorten() {
        let consts = HlrConstants::default();
        let strong = hlr_half_life(&ReviewCounts { right: 20, wrong: 0 }, &consts);
        let weak = hlr_half_life(&ReviewCounts { right: 0, wrong: 20 }, &consts);
        assert!(strong > hlr_half_life(&ReviewCounts::default(), &consts));
        assert!(weak < hlr_half_life(&ReviewCounts::default(), &consts));
    }
}
