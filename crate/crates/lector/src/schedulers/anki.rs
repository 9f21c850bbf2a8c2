//! Anki's default graduating scheduler: learning steps of 1 and 3 days,
//! then interval * ease with ease starting at 2.5; lapses restart the
//! ladder and dock the ease by 0.2 (floor 1.3).
//!
//! State mapping mirrors sm2: `half_life` is the current interval,
//! `mastery` is ease_floor / ease, `interference` is ladder step / 2.

use std::collections::BTreeMap;

use crate::schedulers::constants::AnkiConstants;
use crate::schedulers::sm2::{ease_of, step_of};
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{LearnerProfile, LearningState};

pub fn anki_update(
    state: &LearningState,
    profile: &LearnerProfile,
    outcome: bool,
    consts: &AnkiConstants,
    bounds: &SchedulingBounds,
    day: u32,
) -> SchedulerDecision {
    let ease = ease_of(state, consts.ease_start, consts.ease_floor);
    let (step, new_ease, interval) = if outcome {
        match step_of(state) {
            0 => (1, ease, consts.learning_steps[0]),
            1 => (2, ease, consts.learning_steps[1]),
            _ => (2, ease, state.half_life * ease),
        }
    } else {
        (0, (ease - consts.ease_step).max(consts.ease_floor), 1.0)
    };
    let next_interval = clamp_interval(interval, bounds);

    let mut next = *state;
    next.half_life = next_interval;
    next.mastery = consts.ease_floor / new_ease;
    next.interference = f64::from(step) / 2.0;
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("ease".to_owned(), new_ease);
    diagnostics.insert("step".to_owned(), f64::from(step));
    diagnostics.insert("raw_interval".to_owned(), interval);

    SchedulerDecision {
        next_interval,
        updated_state: next,
        updated_profile: *profile,
        diagnostics,
    }
}
