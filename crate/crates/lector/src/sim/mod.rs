//! Day-by-day review simulation: introduces concepts, draws ground-truth
//! recall outcomes against the latent memory model, and drives whichever
//! scheduler is under test. Learners are fully independent: each has its
//! own seeded random stream, so any worker count produces the same log.

pub mod concepts;
pub mod environment;
pub mod population;

use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use sha2::{Digest, Sha256};

pub use concepts::{assign_concepts, generate_concepts};
pub use environment::{
    confusion_at, latent_update, recall_probability, EnvironmentParams, LatentMemory,
    LearnerTraits,
};
pub use population::generate_population;

use crate::error::Result;
use crate::schedulers::{ReviewContext, ReviewCounts, SchedulerConstants, SchedulerEngine, SchedulingBounds};
use crate::semantics::{build_matrix, InterferenceMatrix, SimilarityCache, SimilarityProvider};
use crate::sim::population::{learner_rng, LearnerStream};
use crate::types::{
    clamp01, ConceptId, ConceptPool, LearnerId, LearnerProfile, LearningState, ReviewEvent,
    SchedulerId, SimulationConfig,
};

/// Everything shared by all schedulers for one experiment: pool,
/// population, per-learner assignments, and the interference matrix.
pub struct World {
    pub pool: ConceptPool,
    pub population: Vec<(LearnerTraits, LearnerProfile)>,
    pub assignments: Vec<Vec<ConceptId>>,
    pub matrix: InterferenceMatrix,
}

impl World {
    pub fn generate(
        cfg: &SimulationConfig,
        env: &EnvironmentParams,
        adaptation_rate: f64,
        provider: &dyn SimilarityProvider,
        cache: &SimilarityCache,
    ) -> Result<Self> {
        cfg.validate()?;
        let pool = generate_concepts(cfg)?;
        let population = generate_population(cfg, env, adaptation_rate)?;
        let assignments = assign_concepts(cfg, &pool)?;
        let matrix = build_matrix(&pool.concepts, provider, cache)?;
        Ok(Self {
            pool,
            population,
            assignments,
            matrix,
        })
    }

    /// Same world with the interference matrix zeroed out: the scheduler
    /// becomes semantics-blind while the environment keeps the true matrix.
    pub fn with_zero_matrix(&self) -> World {
        World {
            pool: self.pool.clone(),
            population: self.population.clone(),
            assignments: self.assignments.clone(),
            matrix: InterferenceMatrix::zeros(self.matrix.concept_ids.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub events: Vec<ReviewEvent>,
    pub config_hash: String,
}

impl EventLog {
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for e in &self.events {
            hasher.update(serde_json::to_vec(e).expect("event serializes"));
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn config_hash(cfg: &SimulationConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(cfg).expect("config serializes"));
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug)]
pub struct SimulationOutcome {
    pub log: EventLog,
    pub final_states: BTreeMap<(LearnerId, ConceptId), LearningState>,
    pub profiles: Vec<LearnerProfile>,
    /// Set when a scheduler error aborted the run; the log keeps every
    /// event recorded up to the abort.
    pub abort: Option<String>,
}

/// How the scheduler under test sees and updates one assigned concept.
struct Slot {
    concept_idx: usize,
    state: LearningState,
    memory: LatentMemory,
    due: f64,
    counts: ReviewCounts,
}

struct LearnerRun {
    learner: u32,
    events: Vec<ReviewEvent>,
    states: Vec<(ConceptId, LearningState)>,
    profile: LearnerProfile,
    abort: Option<String>,
}

fn learner_label(learner: u32, total: u32) -> LearnerId {
    let width = total.max(1).ilog10() as usize + 1;
    LearnerId::new(format!("L{learner:0width$}"))
}

#[allow(clippy::too_many_arguments)]
fn simulate_learner(
    learner: u32,
    cfg: &SimulationConfig,
    env: &EnvironmentParams,
    engine: &SchedulerEngine,
    world: &World,
    ground_truth: &InterferenceMatrix,
    window_cap: usize,
) -> LearnerRun {
    let (traits, initial_profile) = world.population[learner as usize];
    let learner_id = learner_label(learner, cfg.n_learners);
    let assignment = &world.assignments[learner as usize];
    let mut rng = learner_rng(cfg.seed, learner, LearnerStream::Outcomes);

    let mut slots: Vec<Slot> = Vec::with_capacity(assignment.len());
    let mut intro_cursor = 0usize;
    let mut profile = initial_profile;
    let mut recent_window: VecDeque<[f64; 4]> = VecDeque::with_capacity(window_cap);
    let mut review_history: VecDeque<(usize, u32)> = VecDeque::new();
    let mut events = Vec::new();
    let mut abort = None;

    'days: for day in 0..cfg.n_days {
        // Drop history that can no longer confuse anything.
        while let Some(&(_, d)) = review_history.front() {
            if day.saturating_sub(d) > env.confusion_window {
                review_history.pop_front();
            } else {
                break;
            }
        }

        // Introduce new concepts, due immediately.
        for _ in 0..env.introductions_per_day {
            if intro_cursor >= assignment.len() {
                break;
            }
            let id = &assignment[intro_cursor];
            let concept_idx = world
                .matrix
                .index_of(id)
                .expect("assigned concept is in the matrix");
            let concept = world.pool.concept(id).expect("assigned concept exists");
            let difficulty = env.assigned_difficulty(concept.difficulty, traits.ability);
            slots.push(Slot {
                concept_idx,
                state: LearningState::initial(difficulty),
                memory: LatentMemory::initial(&traits, env),
                due: f64::from(day),
                counts: ReviewCounts::default(),
            });
            intro_cursor += 1;
        }

        // Review everything due, in concept-id order.
        let mut due_today: Vec<usize> = (0..slots.len())
            .filter(|&i| slots[i].due <= f64::from(day))
            .collect();
        due_today.sort_by(|&a, &b| {
            world.matrix.concept_ids[slots[a].concept_idx]
                .cmp(&world.matrix.concept_ids[slots[b].concept_idx])
        });
        let history_snapshot: Vec<(usize, u32)> = review_history.iter().copied().collect();

        for slot_idx in due_today {
            let slot = &mut slots[slot_idx];
            let dt = match slot.state.last_review {
                Some(prev) => f64::from(day - prev),
                None => 0.0,
            };
            let confusion = confusion_at(
                ground_truth,
                slot.concept_idx,
                &history_snapshot,
                day,
                env.confusion_window,
            )
            .expect("matrix indices are in range");
            // The scheduler's pressure comes from its own (possibly
            // ablated) matrix; the environment always uses the truth.
            let pressure = confusion_at(
                &world.matrix,
                slot.concept_idx,
                &history_snapshot,
                day,
                env.confusion_window,
            )
            .expect("matrix indices are in range");

            let p_true = recall_probability(&slot.memory, &traits, dt, confusion, env);
            let success = rng.random::<f64>() < p_true;
            let predicted = engine.predict_recall(&slot.state, &profile, pressure, dt);
            slot.memory = latent_update(&slot.memory, &traits, success, slot.state.difficulty, env);

            let ctx = ReviewContext {
                outcome: success,
                day,
                dt,
                pressure,
                history: slot.counts,
                recent: [0.0; 4], // filled below once the window includes this review
            };
            // Trailing-window means, current review included. The speed
            // component uses the reciprocal of the interval this decision
            // assigns, so it is computed after the review; seed it with
            // the previous interval first and patch after the decision.
            let decision = match review_with_recent(
                engine,
                &slot.state,
                &profile,
                ctx,
                &mut recent_window,
                window_cap,
                predicted,
                confusion,
            ) {
                Ok(d) => d,
                Err(e) => {
                    abort = Some(format!("scheduler {} failed: {e}", engine.id()));
                    break 'days;
                }
            };

            events.push(ReviewEvent {
                learner_id: learner_id.clone(),
                concept_id: world.matrix.concept_ids[slot.concept_idx].clone(),
                day,
                scheduled_interval: decision.next_interval,
                success,
                predicted_recall: predicted,
                scheduler_id: engine.id(),
            });

            slot.counts = slot.counts.record(success);
            slot.state = decision.updated_state;
            slot.due = f64::from(day) + decision.next_interval;
            profile = decision.updated_profile;
            review_history.push_back((slot.concept_idx, day));
        }
    }

    let states = slots
        .into_iter()
        .map(|s| (world.matrix.concept_ids[s.concept_idx].clone(), s.state))
        .collect();
    LearnerRun {
        learner,
        events,
        states,
        profile,
        abort,
    }
}

/// Pushes this review's metrics into the trailing window, computes the
/// window means, and runs the scheduler with them.
#[allow(clippy::too_many_arguments)]
fn review_with_recent(
    engine: &SchedulerEngine,
    state: &LearningState,
    profile: &LearnerProfile,
    mut ctx: ReviewContext,
    window: &mut VecDeque<[f64; 4]>,
    cap: usize,
    predicted: f64,
    confusion: f64,
) -> Result<crate::schedulers::SchedulerDecision> {
    // Speed proxy: reciprocal of the interval that led to this review
    // (1 for same-day first exposure).
    let speed = 1.0 / ctx.dt.max(1.0);
    window.push_back([
        if ctx.outcome { 1.0 } else { 0.0 },
        speed,
        predicted,
        confusion,
    ]);
    if window.len() > cap {
        window.pop_front();
    }
    let n = window.len() as f64;
    let mut recent = [0.0f64; 4];
    for row in window.iter() {
        for (acc, v) in recent.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for acc in &mut recent {
        *acc = clamp01(*acc / n);
    }
    ctx.recent = recent;
    engine.review(state, profile, &ctx)
}

/// Runs one scheduler over the whole population, fanning learners across
/// `jobs` workers. The result is identical for any job count.
pub fn run_with_world(
    cfg: &SimulationConfig,
    env: &EnvironmentParams,
    engine: &SchedulerEngine,
    world: &World,
    ground_truth: &InterferenceMatrix,
    jobs: usize,
) -> Result<SimulationOutcome> {
    let window_cap = 20.max(1);
    let n = cfg.n_learners;
    let runs: Mutex<Vec<Option<LearnerRun>>> =
        Mutex::new((0..n).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    let workers = jobs.max(1).min(n as usize);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::SeqCst);
                if i >= n as usize {
                    break;
                }
                let run = simulate_learner(
                    i as u32,
                    cfg,
                    env,
                    engine,
                    world,
                    ground_truth,
                    window_cap,
                );
                runs.lock().unwrap()[i] = Some(run);
            });
        }
    });

    let runs = runs.into_inner().unwrap();
    let mut events = Vec::new();
    let mut final_states = BTreeMap::new();
    let mut profiles = Vec::with_capacity(n as usize);
    let mut abort = None;
    for run in runs.into_iter().flatten() {
        let label = learner_label(run.learner, n);
        for (concept, state) in run.states {
            final_states.insert((label.clone(), concept), state);
        }
        profiles.push(run.profile);
        events.extend(run.events);
        if abort.is_none() {
            abort = run.abort;
        }
    }
    events.sort_by(|a, b| {
        (a.day, &a.learner_id, &a.concept_id).cmp(&(b.day, &b.learner_id, &b.concept_id))
    });

    Ok(SimulationOutcome {
        log: EventLog {
            events,
            config_hash: config_hash(cfg),
        },
        final_states,
        profiles,
        abort,
    })
}

/// Convenience entry point: builds the world and runs one scheduler.
pub fn run_simulation(
    cfg: &SimulationConfig,
    scheduler_id: SchedulerId,
    provider: &dyn SimilarityProvider,
    cache: &SimilarityCache,
) -> Result<SimulationOutcome> {
    let constants = std::sync::Arc::new(SchedulerConstants::default());
    let env = EnvironmentParams::default();
    let world = World::generate(cfg, &env, constants.lector.lambda, provider, cache)?;
    let engine = SchedulerEngine::new(scheduler_id, constants, SchedulingBounds::from(cfg))?;
    let matrix = world.matrix.clone();
    run_with_world(cfg, &env, &engine, &world, &matrix, 1)
}
