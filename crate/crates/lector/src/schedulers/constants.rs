//! Tunable constants for every scheduler, overridable from the experiment
//! config file without recompilation. Defaults are the reference values
//! used throughout the test suite.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LectorConstants {
    /// Weight of interference pressure in the alpha discount.
    pub kappa_sem: f64,
    /// Lower bound on alpha.
    pub alpha_floor: f64,
    /// beta = beta_offset + profile.retention.
    pub beta_offset: f64,
    /// EMA adaptation rate for learner profiles.
    pub lambda: f64,
    /// Success half-life multiplier: growth_base + growth_mastery * mastery.
    pub growth_base: f64,
    pub growth_mastery: f64,
    /// Failure half-life multiplier.
    pub shrink: f64,
    pub half_life_floor: f64,
    /// Mastery update: success mu += gain * (1 - mu); failure mu *= loss.
    pub mastery_gain: f64,
    pub mastery_loss: f64,
    /// F1 = 1 - pressure_weight * pressure.
    pub pressure_weight: f64,
    /// F2 = mastery_factor_offset + mastery.
    pub mastery_factor_offset: f64,
    /// F3 = min(1 + repetition_gain * rho, repetition_cap).
    pub repetition_gain: f64,
    pub repetition_cap: f64,
    /// F4 = speed_factor_offset + profile.learning_speed.
    pub speed_factor_offset: f64,
    /// Trailing review window feeding the profile EMA.
    pub window: usize,
}

impl Default for LectorConstants {
    fn default() -> Self {
        Self {
            kappa_sem: 0.5,
            alpha_floor: 0.1,
            beta_offset: 0.5,
            lambda: 0.2,
            growth_base: 1.6,
            growth_mastery: 0.4,
            shrink: 0.5,
            half_life_floor: 1.0,
            mastery_gain: 0.1,
            mastery_loss: 0.7,
            pressure_weight: 0.3,
            mastery_factor_offset: 0.5,
            repetition_gain: 0.1,
            repetition_cap: 2.0,
            speed_factor_offset: 0.5,
            window: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sm2Constants {
    pub initial_ease: f64,
    pub ease_floor: f64,
    /// Interval after the second consecutive success.
    pub second_interval: f64,
}

impl Default for Sm2Constants {
    fn default() -> Self {
        Self {
            initial_ease: 2.5,
            ease_floor: 1.3,
            second_interval: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HlrConstants {
    pub theta_right: f64,
    pub theta_wrong: f64,
    pub theta_bias: f64,
}

impl Default for HlrConstants {
    fn default() -> Self {
        Self {
            theta_right: 0.3,
            theta_wrong: -0.4,
            theta_bias: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FsrsConstants {
    /// Scale of the stability gain on success.
    pub weight: f64,
    /// Exponent of the stability saturation term.
    pub stability_power: f64,
    /// Scale of the difficulty drift per review.
    pub difficulty_scale: f64,
    /// Failure: stability <- max(floor, shrink * S^power).
    pub failure_shrink: f64,
    pub failure_power: f64,
    pub stability_floor: f64,
}

impl Default for FsrsConstants {
    fn default() -> Self {
        Self {
            weight: 0.05,
            stability_power: -0.2,
            difficulty_scale: 0.05,
            failure_shrink: 0.5,
            failure_power: 0.7,
            stability_floor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnkiConstants {
    pub ease_start: f64,
    pub ease_floor: f64,
    pub ease_step: f64,
    /// Graduating intervals for the learning phase.
    pub learning_steps: [f64; 2],
}

impl Default for AnkiConstants {
    fn default() -> Self {
        Self {
            ease_start: 2.5,
            ease_floor: 1.3,
            ease_step: 0.2,
            learning_steps: [1.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConstants {
    /// Review fires when modeled retention falls to this value.
    pub recall_threshold: f64,
    pub growth: f64,
    pub shrink: f64,
    pub half_life_floor: f64,
}

impl Default for ThresholdConstants {
    fn default() -> Self {
        Self {
            recall_threshold: 0.7,
            growth: 2.0,
            shrink: 0.5,
            half_life_floor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SspmmcConstants {
    /// Success half-life multiplier: growth_base - growth_difficulty * d.
    pub growth_base: f64,
    pub growth_difficulty: f64,
    pub shrink: f64,
    /// Half-life (days) at which a state counts as learned.
    pub horizon: f64,
    pub h_bins: usize,
    pub d_bins: usize,
    /// Candidate recall targets forming the action set.
    pub targets: Vec<f64>,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SspmmcConstants {
    fn default() -> Self {
        Self {
            growth_base: 2.2,
            growth_difficulty: 0.8,
            shrink: 0.5,
            horizon: 100.0,
            h_bins: 16,
            d_bins: 8,
            targets: vec![0.70, 0.75, 0.80, 0.85, 0.90, 0.95],
            tolerance: 1e-8,
            max_sweeps: 10_000,
        }
    }
}

/// All scheduler constants, one block per algorithm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SchedulerConstants {
    pub lector: LectorConstants,
    pub sm2: Sm2Constants,
    pub hlr: HlrConstants,
    pub fsrs: FsrsConstants,
    pub anki: AnkiConstants,
    pub threshold: ThresholdConstants,
    pub sspmmc: SspmmcConstants,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_other_defaults() {
        let json = r#"{"lector": {"kappa_sem": 0.9}, "threshold": {"recall_threshold": 0.5}}"#;
        let c: SchedulerConstants = serde_json::from_str(json).unwrap();
        assert_eq!(c.lector.kappa_sem, 0.9);
        assert_eq!(c.lector.lambda, 0.2);
        assert_eq!(c.threshold.recall_threshold, 0.5);
        assert_eq!(c.sm2, Sm2Constants::default());
    }
}
