//! The latent learner environment: the ground truth schedulers are scored
//! against. Deliberately distinct from every scheduler's internal model —
//! exponential forgetting over a hidden half-life, multiplicative growth on
//! success, and a confusion penalty from recently reviewed similar concepts.
//!
//! Every constant here is overridable from the experiment config.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::semantics::{interference_pressure, InterferenceMatrix};
use crate::types::clamp01;

/// Hidden memory trace for one (learner, concept) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentMemory {
    pub true_half_life: f64,
    pub exposure_count: u32,
}

/// Static per-learner characteristics drawn at population generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerTraits {
    pub ability: f64,
    pub speed: f64,
    pub base_retention: f64,
    pub confusability: f64,
}

/// Environment dynamics constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvironmentParams {
    /// Guessing floor of recall probability.
    pub recall_floor: f64,
    /// Recall ceiling: ceiling_base + ceiling_ability_span * ability.
    pub ceiling_base: f64,
    pub ceiling_ability_span: f64,
    /// Weight of confusion in the multiplicative recall penalty.
    pub confusion_penalty: f64,
    /// Success half-life multiplier: (growth_base - growth_difficulty * d)
    /// * (retention_base + retention_span * base_retention).
    pub growth_base: f64,
    pub growth_difficulty: f64,
    pub retention_base: f64,
    pub retention_span: f64,
    /// Failure half-life multiplier and its floor.
    pub failure_shrink: f64,
    pub half_life_floor: f64,
    /// Initial latent half-life: initial_half_life_base + span * speed.
    pub initial_half_life_base: f64,
    pub initial_half_life_speed_span: f64,
    /// Days a past review stays confusing.
    pub confusion_window: u32,
    /// New concepts introduced per learner per day.
    pub introductions_per_day: u32,
    /// Assignment difficulty: d = clamp(concept difficulty + shift +
    /// scale * (0.5 - ability)); weaker learners see harder items.
    pub difficulty_offset_scale: f64,
    pub difficulty_offset_shift: f64,
    /// Beta(alpha, beta) distribution for learner trait sampling.
    pub population_beta_alpha: f64,
    pub population_beta_beta: f64,
}

impl Default for EnvironmentParams {
    fn default() -> Self {
        Self {
            recall_floor: 0.05,
            ceiling_base: 0.6,
            ceiling_ability_span: 0.38,
            confusion_penalty: 0.4,
            growth_base: 1.8,
            growth_difficulty: 0.6,
            retention_base: 0.8,
            retention_span: 0.4,
            failure_shrink: 0.6,
            half_life_floor: 0.5,
            initial_half_life_base: 12.0,
            initial_half_life_speed_span: 8.0,
            confusion_window: 3,
            introductions_per_day: 5,
            difficulty_offset_scale: 0.25,
            difficulty_offset_shift: 0.3,
            population_beta_alpha: 4.0,
            population_beta_beta: 4.0,
        }
    }
}

impl EnvironmentParams {
    /// Difficulty of a concept as experienced by one learner.
    pub fn assigned_difficulty(&self, concept_difficulty: f64, ability: f64) -> f64 {
        crate::types::clamp01(
            concept_difficulty
                + self.difficulty_offset_shift
                + self.difficulty_offset_scale * (0.5 - ability),
        )
    }
}

impl LatentMemory {
    /// Fresh trace at first exposure; faster learners start with longer
    /// latent half-lives.
    pub fn initial(traits: &LearnerTraits, params: &EnvironmentParams) -> Self {
        Self {
            true_half_life: params.initial_half_life_base
                + params.initial_half_life_speed_span * traits.speed,
            exposure_count: 0,
        }
    }
}

/// Ground-truth recall probability after `dt` days with the given
/// confusion load.
pub fn recall_probability(
    mem: &LatentMemory,
    traits: &LearnerTraits,
    dt: f64,
    confusion: f64,
    params: &EnvironmentParams,
) -> f64 {
    let p_max = params.ceiling_base + params.ceiling_ability_span * traits.ability;
    let decay = (-dt / mem.true_half_life).exp();
    let confusion_factor = 1.0 - params.confusion_penalty * confusion * traits.confusability;
    clamp01(params.recall_floor + (p_max - params.recall_floor) * decay * confusion_factor)
}

/// Environment transition after one review.
pub fn latent_update(
    mem: &LatentMemory,
    traits: &LearnerTraits,
    success: bool,
    difficulty: f64,
    params: &EnvironmentParams,
) -> LatentMemory {
    let true_half_life = if success {
        mem.true_half_life
            * (params.growth_base - params.growth_difficulty * difficulty)
            * (params.retention_base + params.retention_span * traits.base_retention)
    } else {
        (mem.true_half_life * params.failure_shrink).max(params.half_life_floor)
    };
    LatentMemory {
        true_half_life,
        exposure_count: mem.exposure_count + 1,
    }
}

/// Confusion against the target from concepts reviewed within the trailing
/// window (1..=window days ago, snapshot taken before today's session).
pub fn confusion_at(
    matrix: &InterferenceMatrix,
    target: usize,
    recently_reviewed: &[(usize, u32)],
    today: u32,
    window: u32,
) -> Result<f64> {
    let active: Vec<usize> = recently_reviewed
        .iter()
        .filter(|&&(idx, day)| {
            idx != target && day < today && today - day <= window
        })
        .map(|&(idx, _)| idx)
        .collect();
    interference_pressure(matrix, target, &active)
}
