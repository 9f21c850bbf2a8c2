//! The LECTOR scheduler: an exponential forgetting curve whose effective
//! half-life is modulated by mastery, semantic interference pressure and
//! the learner profile, with a multi-factor interval on top and an EMA
//! profile update.

use std::collections::BTreeMap;

use crate::schedulers::constants::LectorConstants;
use crate::schedulers::{clamp_interval, SchedulerDecision, SchedulingBounds};
use crate::types::{clamp01, LearnerProfile, LearningState};
use crate::error::{LectorError, Result};

/// The three half-life modulators of the retention curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetentionParams {
    /// Mastery-scaled half-life, days, > 0.
    pub tau: f64,
    /// Semantic interference factor in (0, 1].
    pub alpha: f64,
    /// Personalization factor, > 0.
    pub beta: f64,
}

impl RetentionParams {
    pub fn effective_half_life(&self) -> f64 {
        self.tau * self.alpha * self.beta
    }
}

/// Multiplicative interval factors; each equals 1 at its neutral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalFactors {
    pub base: f64,
    pub semantic: f64,
    pub mastery: f64,
    pub repetition: f64,
    pub personal: f64,
}

/// Predicted retention after `dt` days: exp(-dt / (tau * alpha * beta)).
pub fn lector_retention(dt: f64, params: &RetentionParams) -> Result<f64> {
    if dt < 0.0 {
        return Err(LectorError::Scheduler(format!(
            "negative elapsed time {dt}"
        )));
    }
    Ok((-dt / params.effective_half_life()).exp())
}

/// tau = h * (1 + mu); alpha = 1 - kappa * pressure * sensitivity (floored);
/// beta = offset + retention.
pub fn lector_params(
    state: &LearningState,
    profile: &LearnerProfile,
    pressure: f64,
    consts: &LectorConstants,
) -> RetentionParams {
    let tau = state.half_life * (1.0 + state.mastery);
    let alpha = (1.0 - consts.kappa_sem * pressure * profile.semantic_sensitivity)
        .max(consts.alpha_floor);
    let beta = consts.beta_offset + profile.retention;
    RetentionParams { tau, alpha, beta }
}

/// The interval at which modeled retention decays to the target recall,
/// scaled by the four optimization factors and clamped to bounds.
pub fn lector_interval(
    state: &LearningState,
    profile: &LearnerProfile,
    pressure: f64,
    consts: &LectorConstants,
    bounds: &SchedulingBounds,
) -> (f64, IntervalFactors) {
    let params = lector_params(state, profile, pressure, consts);
    let base = -bounds.target_recall.ln() * params.effective_half_life();
    let factors = IntervalFactors {
        base,
        semantic: 1.0 - consts.pressure_weight * pressure,
        mastery: consts.mastery_factor_offset + state.mastery,
        repetition: (1.0 + consts.repetition_gain * f64::from(state.repetition_count))
            .min(consts.repetition_cap),
        personal: consts.speed_factor_offset + profile.learning_speed,
    };
    let raw = base * factors.semantic * factors.mastery * factors.repetition * factors.personal;
    (clamp_interval(raw, bounds), factors)
}

/// Per-field EMA: new = (1 - lambda) * old + lambda * recent.
pub fn update_profile(profile: &LearnerProfile, recent: &[f64; 4]) -> LearnerProfile {
    let lambda = profile.adaptation_rate;
    let blend = |old: f64, new: f64| clamp01((1.0 - lambda) * old + lambda * new);
    LearnerProfile {
        success_rate: blend(profile.success_rate, recent[0]),
        learning_speed: blend(profile.learning_speed, recent[1]),
        retention: blend(profile.retention, recent[2]),
        semantic_sensitivity: blend(profile.semantic_sensitivity, recent[3]),
        adaptation_rate: lambda,
    }
}

/// Full review step: state transition, profile EMA, and the next interval
/// computed on the updated state.
#[allow(clippy::too_many_arguments)]
pub fn lector_update(
    state: &LearningState,
    profile: &LearnerProfile,
    outcome: bool,
    pressure: f64,
    recent: &[f64; 4],
    consts: &LectorConstants,
    bounds: &SchedulingBounds,
    day: u32,
) -> SchedulerDecision {
    let mut next = *state;
    if outcome {
        next.half_life = state.half_life * (consts.growth_base + consts.growth_mastery * state.mastery);
        next.mastery = clamp01(state.mastery + consts.mastery_gain * (1.0 - state.mastery));
    } else {
        next.half_life = (state.half_life * consts.shrink).max(consts.half_life_floor);
        next.mastery = clamp01(state.mastery * consts.mastery_loss);
    }
    next.interference = clamp01(pressure);
    next.repetition_count = state.repetition_count + 1;
    next.last_review = Some(day);

    let updated_profile = update_profile(profile, recent);
    let (next_interval, factors) = lector_interval(&next, &updated_profile, pressure, consts, bounds);
    let params = lector_params(&next, &updated_profile, pressure, consts);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("i_base".to_owned(), factors.base);
    diagnostics.insert("f1_semantic".to_owned(), factors.semantic);
    diagnostics.insert("f2_mastery".to_owned(), factors.mastery);
    diagnostics.insert("f3_repetition".to_owned(), factors.repetition);
    diagnostics.insert("f4_personal".to_owned(), factors.personal);
    diagnostics.insert("tau".to_owned(), params.tau);
    diagnostics.insert("alpha".to_owned(), params.alpha);
    diagnostics.insert("beta".to_owned(), params.beta);

    SchedulerDecision {
        next_interval,
        updated_state: next,
        updated_profile,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(half_life: f64, mastery: f64) -> LearningState {
        LearningState {
            difficulty: 0.5,
            half_life,
            repetition_count: 3,
            mastery,
            interference: 0.0,
            last_review: Some(2),
        }
    }

    fn profile() -> LearnerProfile {
        LearnerProfile::neutral(0.2)
    }

    #[test]
    fn retention_is_one_at_zero_elapsed() {
        let p = RetentionParams {
            tau: 3.0,
            alpha: 0.8,
            beta: 1.2,
        };
        assert_eq!(lector_retention(0.0, &p).unwrap(), 1.0);
    }

    #[test]
    fn retention_analytic_points() {
        let p = RetentionParams {
            tau: 5.0,
            alpha: 1.0,
            beta: 1.0,
        };
        let r = lector_retention(5.0, &p).unwrap();
        assert!((r - (-1.0f64).exp()).abs() < 1e-12);

        // alpha = 0.5 halves the effective half-life
        let p = RetentionParams {
            tau: 4.0,
            alpha: 0.5,
            beta: 1.0,
        };
        let r = lector_retention(2.0, &p).unwrap();
        assert!((r - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn retention_rejects_negative_dt() {
        let p = RetentionParams {
            tau: 1.0,
            alpha: 1.0,
            beta: 1.0,
        };
        assert!(lector_retention(-0.1, &p).is_err());
    }

    #[test]
    fn params_neutral_point() {
        let consts = LectorConstants::default();
        let p = lector_params(&state(3.0, 0.0), &profile(), 0.0, &consts);
        assert_eq!(p.tau, 3.0);
        assert_eq!(p.alpha, 1.0);
        assert_eq!(p.beta, 1.0);
    }

    #[test]
    fn params_mastery_scaling() {
        let consts = LectorConstants::default();
        let p = lector_params(&state(4.0, 1.0), &profile(), 0.0, &consts);
        assert_eq!(p.tau, 8.0);
    }

    #[test]
    fn params_alpha_discount_and_floor() {
        let consts = LectorConstants::default();
        let mut prof = profile();
        prof.semantic_sensitivity = 1.0;
        let p = lector_params(&state(1.0, 0.0), &prof, 1.0, &consts);
        assert_eq!(p.alpha, 0.5);

        let harsh = LectorConstants {
            kappa_sem: 1.0,
            ..consts
        };
        let p = lector_params(&state(1.0, 0.0), &prof, 1.0, &harsh);
        assert_eq!(p.alpha, 0.1);
    }

    #[test]
    fn interval_reduces_to_base_at_neutral_factors() {
        let consts = LectorConstants::default();
        let bounds = SchedulingBounds::default();
        let mut s = state(20.0, 0.5);
        s.repetition_count = 0;
        let (interval, factors) = lector_interval(&s, &profile(), 0.0, &consts, &bounds);
        assert_eq!(factors.semantic, 1.0);
        assert_eq!(factors.mastery, 1.0);
        assert_eq!(factors.repetition, 1.0);
        assert_eq!(factors.personal, 1.0);
        assert!((interval - factors.base).abs() < 1e-12);
    }

    #[test]
    fn interval_base_matches_target_recall_crossing() {
        // tau * alpha * beta = 10 with target 0.9 -> 10 * ln(10/9)
        let consts = LectorConstants::default();
        let bounds = SchedulingBounds::default();
        let mut s = state(10.0, 0.0);
        s.repetition_count = 0;
        let (_, factors) = lector_interval(&s, &profile(), 0.0, &consts, &bounds);
        assert!((factors.base - 1.0536).abs() < 1e-4);
    }

    #[test]
    fn interval_clamps_to_minimum() {
        let consts = LectorConstants::default();
        let bounds = SchedulingBounds::default();
        let (interval, _) = lector_interval(&state(0.5, 0.0), &profile(), 0.0, &consts, &bounds);
        assert_eq!(interval, bounds.min_interval);
    }

    #[test]
    fn update_success_grows_half_life_and_mastery() {
        let consts = LectorConstants::default();
        let bounds = SchedulingBounds::default();
        let d = lector_update(
            &state(1.0, 0.0),
            &profile(),
            true,
            0.0,
            &[1.0, 0.5, 0.9, 0.0],
            &consts,
            &bounds,
            7,
        );
        assert!((d.updated_state.half_life - 1.6).abs() < 1e-12);
        assert!((d.updated_state.mastery - 0.1).abs() < 1e-12);
        assert_eq!(d.updated_state.repetition_count, 4);
        assert_eq!(d.updated_state.last_review, Some(7));
    }

    #[test]
    fn update_failure_shrinks_with_floor() {
        let consts = LectorConstants::default();
        let bounds = SchedulingBounds::default();
        let d = lector_update(
            &state(4.0, 0.5),
            &profile(),
            false,
            0.0,
            &[0.0, 0.5, 0.5, 0.0],
            &consts,
            &bounds,
            7,
        );
        assert!((d.updated_state.half_life - 2.0).abs() < 1e-12);
        assert!((d.updated_state.mastery - 0.35).abs() < 1e-12);

        let d = lector_update(
            &state(1.2, 0.0),
            &profile(),
            false,
            0.0,
            &[0.0, 0.5, 0.5, 0.0],
            &consts,
            &bounds,
            7,
        );
        assert_eq!(d.updated_state.half_life, 1.0);
    }

    #[test]
    fn profile_ema_endpoints_and_midpoint() {
        let recent = [0.9, 0.9, 0.9, 0.9];
        let mut p = profile();
        p.adaptation_rate = 0.0;
        assert_eq!(update_profile(&p, &recent), p);

        p.adaptation_rate = 1.0;
        let updated = update_profile(&p, &recent);
        assert_eq!(updated.fields(), recent);

        p.adaptation_rate = 0.3;
        let updated = update_profile(&p, &recent);
        for f in updated.fields() {
            assert!((f - 0.62).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn retention_semigroup(
            dt1 in 0.0..50.0f64,
            dt2 in 0.0..50.0f64,
            tau in 0.1..50.0f64,
            alpha in 0.1..=1.0f64,
            beta in 0.5..2.0f64,
        ) {
            let p = RetentionParams { tau, alpha, beta };
            let joint = lector_retention(dt1 + dt2, &p).unwrap();
            let split = lector_retention(dt1, &p).unwrap() * lector_retention(dt2, &p).unwrap();
            prop_assert!((joint - split).abs() < 1e-12);
        }

        #[test]
        fn retention_strictly_decreasing(
            dt in 0.0..50.0f64,
            step in 0.001..10.0f64,
            tau in 0.1..50.0f64,
        ) {
            let p = RetentionParams { tau, alpha: 1.0, beta: 1.0 };
            let before = lector_retention(dt, &p).unwrap();
            let after = lector_retention(dt + step, &p).unwrap();
            prop_assert!(after < before);
        }

        #[test]
        fn interval_monotone_nonincreasing_in_pressure(
            p1 in 0.0..=1.0f64,
            p2 in 0.0..=1.0f64,
            half_life in 0.5..100.0f64,
            mastery in 0.0..=1.0f64,
            sensitivity in 0.0..=1.0f64,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let consts = LectorConstants::default();
            let bounds = SchedulingBounds::default();
            let mut prof = profile();
            prof.semantic_sensitivity = sensitivity;
            let s = state(half_life, mastery);
            let (i_lo, _) = lector_interval(&s, &prof, lo, &consts, &bounds);
            let (i_hi, _) = lector_interval(&s, &prof, hi, &consts, &bounds);
            prop_assert!(i_hi <= i_lo + 1e-12);
        }

        #[test]
        fn profile_update_is_convex_combination(
            old in proptest::array::uniform4(0.0..=1.0f64),
            recent in proptest::array::uniform4(0.0..=1.0f64),
            lambda in 0.0..=1.0f64,
        ) {
            let p = LearnerProfile {
                success_rate: old[0],
                learning_speed: old[1],
                retention: old[2],
                semantic_sensitivity: old[3],
                adaptation_rate: lambda,
            };
            let updated = update_profile(&p, &recent);
            for (i, f) in updated.fields().into_iter().enumerate() {
                prop_assert!(f >= old[i].min(recent[i]) - 1e-12);
                prop_assert!(f <= old[i].max(recent[i]) + 1e-12);
            }
            prop_assert_eq!(updated.adaptation_rate, lambda);
        }

        #[test]
        fn half_life_never_below_floor(
            half_life in 1.0..400.0f64,
            mastery in 0.0..=1.0f64,
            outcomes in proptest::collection::vec(proptest::bool::ANY, 1..30),
        ) {
            let consts = LectorConstants::default();
            let bounds = SchedulingBounds::default();
            let mut s = state(half_life, mastery);
            let prof = profile();
            for (i, outcome) in outcomes.into_iter().enumerate() {
                let d = lector_update(
                    &s, &prof, outcome, 0.3, &[0.5; 4], &consts, &bounds, i as u32,
                );
                s = d.updated_state;
                prop_assert!(s.half_life >= 1.0);
                prop_assert!(crate::types::validate_state(&s).is_empty());
            }
        }
    }
}
