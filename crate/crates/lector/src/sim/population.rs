//! Synthetic learner population with independent per-learner random
//! streams, so parallel and serial execution agree bit-for-bit and one
//! learner's stream never bleeds into another's.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{LectorError, Result};
use crate::sim::environment::{EnvironmentParams, LearnerTraits};
use crate::types::{LearnerProfile, SimulationConfig};

/// Stream ids: 0..4 are global (pool generation), then 4 per learner.
const GLOBAL_STREAMS: u64 = 4;
pub(crate) const STREAM_POOL: u64 = 0;

#[derive(Debug, Clone, Copy)]
pub(crate) enum LearnerStream {
    Traits = 0,
    Assignment = 1,
    Outcomes = 2,
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn learner_rng(seed: u64, learner: u32, kind: LearnerStream) -> ChaCha8Rng {
    stream_rng(
        seed,
        GLOBAL_STREAMS + u64::from(learner) * 4 + kind as u64,
    )
}

/// Draws every learner's traits from Beta(alpha, beta) per field and
/// pairs them with a neutral starting profile.
pub fn generate_population(
    cfg: &SimulationConfig,
    env: &EnvironmentParams,
    adaptation_rate: f64,
) -> Result<Vec<(LearnerTraits, LearnerProfile)>> {
    let beta = Beta::new(env.population_beta_alpha, env.population_beta_beta).map_err(|e| {
        LectorError::Config(format!(
            "invalid population beta parameters ({}, {}): {e}",
            env.population_beta_alpha, env.population_beta_beta
        ))
    })?;
    let mut population = Vec::with_capacity(cfg.n_learners as usize);
    for learner in 0..cfg.n_learners {
        let mut rng = learner_rng(cfg.seed, learner, LearnerStream::Traits);
        let traits = LearnerTraits {
            ability: beta.sample(&mut rng),
            speed: beta.sample(&mut rng),
            base_retention: beta.sample(&mut rng),
            confusability: beta.sample(&mut rng),
        };
        population.push((traits, LearnerProfile::neutral(adaptation_rate)));
    }
    Ok(population)
}
