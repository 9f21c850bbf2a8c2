//! LECTOR: a semantic-aware, profile-adaptive spaced repetition engine,
//! six baseline schedulers, and a deterministic learner simulator for
//! benchmarking them against each other.

pub mod error;
pub mod experiment;
pub mod metrics;
pub mod output;
pub mod plot;
pub mod schedulers;
pub mod semantics;
pub mod sim;
pub mod types;

pub use error::{LectorError, Result};
pub use types::{
    clamp_unit, validate_state, Concept, ConceptId, ConceptPool, GroupId, LearnerId,
    LearnerProfile, LearningState, ProviderKind, ReviewEvent, SchedulerId, SemanticGroup,
    SimulationConfig,
};
