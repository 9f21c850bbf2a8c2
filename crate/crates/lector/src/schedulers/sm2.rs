//! SuperMemo-2 classic.
//!
//! State mapping: `half_life` holds the current interval, `mastery` holds
//! ease_floor / EF (so every EF >= 1.3 maps into (0, 1] and the floor is
//! structural), and `interference` holds the consecutive-success step
//! (0, 1, or graduated) as step / 2. `repetition_count` stays a total
//! review counter; the SM-2 repetition that resets on lapses is the step.

use std::collections::BTreeMap;

use crate::error::{LectorError, Result};
use crate::schedulers::constants::Sm2Constants;
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{LearnerProfile, LearningState};

pub(crate) fn ease_of(state: &LearningState, initial: f64, floor: f64) -> f64 {
    if state.repetition_count == 0 {
        initial
    } else {
        floor / state.mastery
    }
}

pub(crate) fn step_of(state: &LearningState) -> u32 {
    (state.interference * 2.0).round() as u32
}

pub fn sm2_update(
    state: &LearningState,
    profile: &LearnerProfile,
    quality: u8,
    consts: &Sm2Constants,
    bounds: &SchedulingBounds,
    day: u32,
) -> Result<SchedulerDecision> {
    if quality > 5 {
        return Err(LectorError::Scheduler(format!(
            "SM-2 quality {quality} outside 0..5"
        )));
    }
    let ease = ease_of(state, consts.initial_ease, consts.ease_floor);
    let q = f64::from(quality);
    let ease_new = (ease + 0.1 - (5.0 - q) * (0.08 + (5.0 - q) * 0.02)).max(consts.ease_floor);

    let (step, interval) = if quality >= 3 {
        match step_of(state) {
            0 => (1, 1.0),
            1 => (2, consts.second_interval),
            _ => (2, state.half_life * ease_new),
        }
    } else {
        (0, 1.0)
    };
    let next_interval = clamp_interval(interval, bounds);

    let mut next = *state;
    next.half_life = next_interval;
    next.mastery = consts.ease_floor / ease_new;
    next.interference = f64::from(step) / 2.0;
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("ease".to_owned(), ease_new);
    diagnostics.insert("step".to_owned(), f64::from(step));
    diagnostics.insert("raw_interval".to_owned(), interval);

    Ok(SchedulerDecision {
        next_interval,
        updated_state: next,
        updated_profile: *profile,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_state;
    use proptest::prelude::*;

    /// Independent canonical SM-2 oracle: raw EF, repetition counter and
    /// interval, transcribed directly from the published algorithm with
    /// the same interval clamp this artifact applies everywhere.
    struct Sm2Oracle {
        ef: f64,
        reps: u32,
        interval: f64,
    }

    impl Sm2Oracle {
        fn new() -> Self {
            Self {
                ef: 2.5,
                reps: 0,
                interval: 0.0,
            }
        }

        fn review(&mut self, q: u8, bounds: &SchedulingBounds) -> f64 {
            let qf = f64::from(q);
            self.ef += 0.1 - (5.0 - qf) * (0.08 + (5.0 - qf) * 0.02);
            if self.ef < 1.3 {
                self.ef = 1.3;
            }
            if q >= 3 {
                self.reps += 1;
                self.interval = match self.reps {
                    1 => 1.0,
                    2 => 6.0,
                    _ => self.interval * self.ef,
                };
            } else {
                self.reps = 0;
                self.interval = 1.0;
            }
            self.interval = self.interval.clamp(bounds.min_interval, bounds.max_interval);
            self.interval
        }
    }

    fn fresh() -> LearningState {
        LearningState::initial(0.5)
    }

    fn run_impl(qualities: &[u8]) -> Vec<f64> {
        let consts = Sm2Constants::default();
        let bounds = SchedulingBounds::default();
        let profile = LearnerProfile::neutral(0.2);
        let mut state = fresh();
        qualities
            .iter()
            .enumerate()
            .map(|(day, &q)| {
                let d = sm2_update(&state, &profile, q, &consts, &bounds, day as u32).unwrap();
                state = d.updated_state;
                assert!(validate_state(&state).is_empty());
                d.next_interval
            })
            .collect()
    }

    #[test]
    fn first_two_successes_match_oracle() {
        let bounds = SchedulingBounds::default();
        let mut oracle = Sm2Oracle::new();
        let expected: Vec<f64> = vec![oracle.review(5, &bounds), oracle.review(5, &bounds)];
        assert_eq!(expected, vec![1.0, 6.0]);
        assert_eq!(run_impl(&[5, 5]), expected);
    }

    #[test]
    fn lapse_resets_interval_to_one() {
        let bounds = SchedulingBounds::default();
        let mut oracle = Sm2Oracle::new();
        for q in [5, 5, 5] {
            oracle.review(q, &bounds);
        }
        let expected = oracle.review(2, &bounds);
        assert_eq!(expected, 1.0);
        let got = run_impl(&[5, 5, 5, 2]);
        assert_eq!(*got.last().unwrap(), 1.0);
    }

    #[test]
    fn ease_floor_reached_after_repeated_low_quality() {
        let consts = Sm2Constants::default();
        let bounds = SchedulingBounds::default();
        let profile = LearnerProfile::neutral(0.2);
        let mut state = fresh();
        for day in 0..10 {
            let d = sm2_update(&state, &profile, 3, &consts, &bounds, day).unwrap();
            state = d.updated_state;
        }
        // q=3 subtracts 0.14 per review; ease must bottom out at exactly 1.3
        let ease = consts.ease_floor / state.mastery;
        assert!((ease - 1.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_quality() {
        let consts = Sm2Constants::default();
        let bounds = SchedulingBounds::default();
        let profile = LearnerProfile::neutral(0.2);
        assert!(sm2_update(&fresh(), &profile, 6, &consts, &bounds, 0).is_err());
    }

    proptest! {
        #[test]
        fn interval_sequences_match_canonical_oracle(
            qualities in proptest::collection::vec(0u8..=5, 1..40),
        ) {
            let bounds = SchedulingBounds::default();
            let mut oracle = Sm2Oracle::new();
            let expected: Vec<f64> = qualities
                .iter()
                .map(|&q| oracle.review(q, &bounds))
                .collect();
            let got = run_impl(&qualities);
            for (e, g) in expected.iter().zip(&got) {
                prop_assert!((e - g).abs() < 1e-9 * e.max(1.0), "expected {e}, got {g}");
            }
        }

        #[test]
        fn ease_never_below_floor(
            qualities in proptest::collection::vec(0u8..=5, 1..60),
        ) {
            let consts = Sm2Constants::default();
            let bounds = SchedulingBounds::default();
            let profile = LearnerProfile::neutral(0.2);
            let mut state = fresh();
            for (day, &q) in qualities.iter().enumerate() {
                let d = sm2_update(&state, &profile, q, &consts, &bounds, day as u32).unwrap();
                state = d.updated_state;
                let ease = consts.ease_floor / state.mastery;
                prop_assert!(ease >= 1.3 - 1e-12);
            }
        }
    }
}
