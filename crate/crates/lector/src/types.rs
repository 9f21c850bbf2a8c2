//! Core domain types shared by every other module: concepts and their
//! semantic groups, per-item learning state, learner profiles, review
//! events, and the simulation configuration.
//!
//! All types serialize to JSON with snake_case field names. Concept pools
//! load from a nested JSON file (groups containing member concepts).

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LectorError, Result};

/// Every generated semantic group holds this many concepts.
pub const GROUP_SIZE: usize = 5;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

id_type!(ConceptId);
id_type!(GroupId);
id_type!(LearnerId);

/// A vocabulary item: the unit being scheduled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub term: String,
    pub gloss: String,
    pub group_id: GroupId,
    /// Intrinsic difficulty in [0, 1].
    pub difficulty: f64,
}

/// A cluster of semantically related concepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticGroup {
    pub group_id: GroupId,
    /// Ordered, duplicate-free member list.
    pub members: Vec<ConceptId>,
    /// Within-group similarity prior in [0, 1], used by the offline provider.
    pub base_similarity: f64,
}

/// The per-(learner, concept) learning state quintuple.
///
/// Field interpretation is scheduler-private beyond the invariants below:
/// LECTOR keeps a genuine half-life in `half_life` and mastery in `mastery`,
/// while e.g. SM-2 keeps its current interval in `half_life` and a reciprocal
/// encoding of its ease factor in `mastery` (see the scheduler modules).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningState {
    /// Difficulty in [0, 1], fixed at assignment time for most schedulers.
    pub difficulty: f64,
    /// Memory half-life in days, strictly positive.
    pub half_life: f64,
    /// Total number of completed reviews.
    pub repetition_count: u32,
    /// Mastery level in [0, 1].
    pub mastery: f64,
    /// Semantic interference pressure in [0, 1].
    pub interference: f64,
    /// Day index of the most recent review; `None` before the first review.
    pub last_review: Option<u32>,
}

impl LearningState {
    /// State on first exposure: unit half-life, nothing learned yet.
    pub fn initial(difficulty: f64) -> Self {
        Self {
            difficulty,
            half_life: 1.0,
            repetition_count: 0,
            mastery: 0.0,
            interference: 0.0,
            last_review: None,
        }
    }
}

/// Returns one entry per violated `LearningState` invariant; empty means valid.
pub fn validate_state(state: &LearningState) -> Vec<String> {
    let mut violations = Vec::new();
    if !(state.difficulty >= 0.0 && state.difficulty <= 1.0) {
        violations.push(format!("difficulty {} outside [0, 1]", state.difficulty));
    }
    if !(state.half_life > 0.0) {
        violations.push(format!("half_life {} violates h > 0", state.half_life));
    }
    if !(state.mastery >= 0.0 && state.mastery <= 1.0) {
        violations.push(format!("mastery {} outside [0, 1]", state.mastery));
    }
    if !(state.interference >= 0.0 && state.interference <= 1.0) {
        violations.push(format!(
            "interference {} outside [0, 1]",
            state.interference
        ));
    }
    match (state.repetition_count, state.last_review) {
        (0, Some(day)) => violations.push(format!(
            "repetition_count = 0 but last_review = {day}; rho = 0 iff last_review none"
        )),
        (n, None) if n > 0 => violations.push(format!(
            "repetition_count = {n} but last_review none; rho = 0 iff last_review none"
        )),
        _ => {}
    }
    violations
}

/// Clamps a finite real into [0, 1]; non-finite input signals corrupted
/// upstream computation and is an error rather than a silent saturation.
pub fn clamp_unit(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(LectorError::NonFinite {
            context: "clamp_unit",
            value: x,
        });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Infallible clamp for internal formula plumbing where inputs are finite
/// by construction.
#[inline]
pub(crate) fn clamp01(x: f64) -> f64 {
    debug_assert!(x.is_finite(), "non-finite value reached clamp01: {x}");
    x.clamp(0.0, 1.0)
}

/// Per-learner adaptive profile, updated by exponential moving average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerProfile {
    pub success_rate: f64,
    pub learning_speed: f64,
    pub retention: f64,
    pub semantic_sensitivity: f64,
    /// EMA adaptation rate lambda in [0, 1], constant within a run.
    pub adaptation_rate: f64,
}

impl LearnerProfile {
    /// Neutral starting profile: every field at 0.5.
    pub fn neutral(adaptation_rate: f64) -> Self {
        Self {
            success_rate: 0.5,
            learning_speed: 0.5,
            retention: 0.5,
            semantic_sensitivity: 0.5,
            adaptation_rate,
        }
    }

    pub fn fields(&self) -> [f64; 4] {
        [
            self.success_rate,
            self.learning_speed,
            self.retention,
            self.semantic_sensitivity,
        ]
    }
}

/// The seven scheduling algorithms under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SchedulerId {
    #[serde(rename = "lector")]
    Lector,
    #[serde(rename = "sm2")]
    Sm2,
    #[serde(rename = "hlr")]
    Hlr,
    /// Reduced two-parameter stability/difficulty variant.
    #[serde(rename = "fsrs-simplified")]
    Fsrs,
    #[serde(rename = "anki")]
    Anki,
    #[serde(rename = "threshold")]
    Threshold,
    /// Value-iteration threshold policy variant.
    #[serde(rename = "sspmmc-simplified")]
    SspMmc,
}

impl SchedulerId {
    pub const ALL: [SchedulerId; 7] = [
        SchedulerId::Lector,
        SchedulerId::Sm2,
        SchedulerId::Hlr,
        SchedulerId::Fsrs,
        SchedulerId::Anki,
        SchedulerId::Threshold,
        SchedulerId::SspMmc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchedulerId::Lector => "lector",
            SchedulerId::Sm2 => "sm2",
            SchedulerId::Hlr => "hlr",
            SchedulerId::Fsrs => "fsrs-simplified",
            SchedulerId::Anki => "anki",
            SchedulerId::Threshold => "threshold",
            SchedulerId::SspMmc => "sspmmc-simplified",
        }
    }
}

impl fmt::Display for SchedulerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerId {
    type Err = LectorError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lector" => Ok(SchedulerId::Lector),
            "sm2" => Ok(SchedulerId::Sm2),
            "hlr" => Ok(SchedulerId::Hlr),
            "fsrs" | "fsrs-simplified" => Ok(SchedulerId::Fsrs),
            "anki" => Ok(SchedulerId::Anki),
            "threshold" => Ok(SchedulerId::Threshold),
            "sspmmc" | "ssp-mmc" | "sspmmc-simplified" => Ok(SchedulerId::SspMmc),
            other => Err(LectorError::Config(format!("unknown scheduler: {other}"))),
        }
    }
}

/// One review attempt, the unit record of the simulation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewEvent {
    pub learner_id: LearnerId,
    pub concept_id: ConceptId,
    pub day: u32,
    /// Interval the scheduler had assigned leading to this review, days, >= 1.
    pub scheduled_interval: f64,
    pub success: bool,
    /// The scheduler's own recall prediction at review time.
    pub predicted_recall: f64,
    pub scheduler_id: SchedulerId,
}

/// Which similarity provider backs the interference matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    #[default]
    Offline,
    Llm,
}

fn default_min_interval() -> f64 {
    1.0
}

fn default_max_interval() -> f64 {
    365.0
}

fn default_target_recall() -> f64 {
    0.9
}

fn default_schedulers() -> Vec<SchedulerId> {
    SchedulerId::ALL.to_vec()
}

/// Full run parameterization. Defaults mirror the benchmark setup of
/// 100 learners, 100 days, 25 concepts each from a 50-group pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_learners: u32,
    pub n_days: u32,
    pub concepts_per_learner: u32,
    pub n_groups: u32,
    pub seed: u64,
    #[serde(default = "default_schedulers")]
    pub scheduler_ids: Vec<SchedulerId>,
    #[serde(default)]
    pub provider: ProviderKind,
    #[serde(default = "default_min_interval")]
    pub min_interval: f64,
    #[serde(default = "default_max_interval")]
    pub max_interval: f64,
    #[serde(default = "default_target_recall")]
    pub target_recall: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_learners: 100,
            n_days: 100,
            concepts_per_learner: 25,
            n_groups: 50,
            seed: 42,
            scheduler_ids: default_schedulers(),
            provider: ProviderKind::Offline,
            min_interval: default_min_interval(),
            max_interval: default_max_interval(),
            target_recall: default_target_recall(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_learners == 0 || self.n_days == 0 || self.concepts_per_learner == 0 {
            return Err(LectorError::Config(
                "n_learners, n_days and concepts_per_learner must be positive".into(),
            ));
        }
        if self.n_groups == 0 {
            return Err(LectorError::Config("n_groups must be positive".into()));
        }
        if self.concepts_per_learner as usize > self.n_groups as usize * GROUP_SIZE {
            return Err(LectorError::Config(format!(
                "concepts_per_learner {} exceeds pool capacity {} ({} groups x {})",
                self.concepts_per_learner,
                self.n_groups as usize * GROUP_SIZE,
                self.n_groups,
                GROUP_SIZE
            )));
        }
        if !(self.min_interval <= self.max_interval) {
            return Err(LectorError::Config(format!(
                "min_interval {} must not exceed max_interval {}",
                self.min_interval, self.max_interval
            )));
        }
        if !(self.min_interval >= 0.0) {
            return Err(LectorError::Config("min_interval must be >= 0".into()));
        }
        if !(self.target_recall > 0.0 && self.target_recall < 1.0) {
            return Err(LectorError::Config(format!(
                "target_recall {} must lie in (0, 1)",
                self.target_recall
            )));
        }
        let mut seen = HashSet::new();
        for id in &self.scheduler_ids {
            if !seen.insert(*id) {
                return Err(LectorError::Config(format!("duplicate scheduler: {id}")));
            }
        }
        if self.scheduler_ids.is_empty() {
            return Err(LectorError::Config("no schedulers requested".into()));
        }
        Ok(())
    }
}

/// A concept pool: every concept plus the group structure over them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConceptPool {
    pub concepts: Vec<Concept>,
    pub groups: Vec<SemanticGroup>,
}

/// On-disk layout: groups own their member concepts.
#[derive(Debug, Serialize, Deserialize)]
struct PoolFile {
    groups: Vec<PoolFileGroup>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PoolFileGroup {
    group_id: GroupId,
    base_similarity: f64,
    members: Vec<PoolFileConcept>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PoolFileConcept {
    id: ConceptId,
    term: String,
    gloss: String,
    difficulty: f64,
}

impl ConceptPool {
    pub fn new(concepts: Vec<Concept>, groups: Vec<SemanticGroup>) -> Result<Self> {
        let pool = Self { concepts, groups };
        pool.validate()?;
        Ok(pool)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for c in &self.concepts {
            if !ids.insert(&c.id) {
                return Err(LectorError::Pool(format!("duplicate concept id {}", c.id)));
            }
            if !(c.difficulty >= 0.0 && c.difficulty <= 1.0) {
                return Err(LectorError::Pool(format!(
                    "concept {} difficulty {} outside [0, 1]",
                    c.id, c.difficulty
                )));
            }
            if !self.groups.iter().any(|g| g.group_id == c.group_id) {
                return Err(LectorError::Pool(format!(
                    "concept {} references unknown group {}",
                    c.id, c.group_id
                )));
            }
        }
        for g in &self.groups {
            if g.members.is_empty() {
                return Err(LectorError::Pool(format!("group {} is empty", g.group_id)));
            }
            let mut members = HashSet::new();
            for m in &g.members {
                if !members.insert(m) {
                    return Err(LectorError::Pool(format!(
                        "group {} lists member {m} twice",
                        g.group_id
                    )));
                }
                if !ids.contains(m) {
                    return Err(LectorError::Pool(format!(
                        "group {} references unknown concept {m}",
                        g.group_id
                    )));
                }
            }
            if !(g.base_similarity >= 0.0 && g.base_similarity <= 1.0) {
                return Err(LectorError::Pool(format!(
                    "group {} base_similarity {} outside [0, 1]",
                    g.group_id, g.base_similarity
                )));
            }
        }
        Ok(())
    }

    pub fn concept(&self, id: &ConceptId) -> Option<&Concept> {
        self.concepts.iter().find(|c| &c.id == id)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let file: PoolFile = serde_json::from_str(&raw)?;
        let mut concepts = Vec::new();
        let mut groups = Vec::new();
        for g in file.groups {
            let member_ids = g.members.iter().map(|m| m.id.clone()).collect();
            for m in g.members {
                concepts.push(Concept {
                    id: m.id,
                    term: m.term,
                    gloss: m.gloss,
                    group_id: g.group_id.clone(),
                    difficulty: m.difficulty,
                });
            }
            groups.push(SemanticGroup {
                group_id: g.group_id,
                members: member_ids,
                base_similarity: g.base_similarity,
            });
        }
        Self::new(concepts, groups)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let groups = self
            .groups
            .iter()
            .map(|g| PoolFileGroup {
                group_id: g.group_id.clone(),
                base_similarity: g.base_similarity,
                members: g
                    .members
                    .iter()
                    .filter_map(|id| self.concept(id))
                    .map(|c| PoolFileConcept {
                        id: c.id.clone(),
                        term: c.term.clone(),
                        gloss: c.gloss.clone(),
                        difficulty: c.difficulty,
                    })
                    .collect(),
            })
            .collect();
        let file = PoolFile { groups };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }
}
