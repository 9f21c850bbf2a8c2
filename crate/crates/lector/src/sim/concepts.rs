//! Synthetic concept pool generation and per-learner assignment.
//!
//! Groups share a random pronounceable stem so the offline trigram scorer
//! sees high within-group similarity; assignment samples without
//! replacement in group-stratified waves, so k concepts always cover
//! min(k, n_groups) distinct groups.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{LectorError, Result};
use crate::sim::population::{learner_rng, stream_rng, LearnerStream, STREAM_POOL};
use crate::types::{
    Concept, ConceptId, ConceptPool, GroupId, SemanticGroup, SimulationConfig, GROUP_SIZE,
};

const CONSONANTS: [char; 12] = ['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't'];
const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];
const SUFFIXES: [&str; GROUP_SIZE] = ["", "a", "is", "or", "um"];

fn random_stem(rng: &mut impl Rng) -> String {
    // CVCVC: five letters, so any two same-group terms share a prefix >= 4
    let mut stem = String::with_capacity(5);
    for i in 0..5 {
        if i % 2 == 0 {
            stem.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())]);
        } else {
            stem.push(VOWELS[rng.random_range(0..VOWELS.len())]);
        }
    }
    stem
}

/// Builds n_groups groups of five stem-sharing concepts each.
pub fn generate_concepts(cfg: &SimulationConfig) -> Result<ConceptPool> {
    let mut rng = stream_rng(cfg.seed, STREAM_POOL);
    let mut stems = std::collections::HashSet::new();
    let mut concepts = Vec::new();
    let mut groups = Vec::new();
    for g in 0..cfg.n_groups {
        let stem = loop {
            let candidate = random_stem(&mut rng);
            if stems.insert(candidate.clone()) {
                break candidate;
            }
        };
        let group_id = GroupId::new(format!("grp{g:03}"));
        let base_similarity = rng.random_range(0.5..0.9);
        let mut members = Vec::with_capacity(GROUP_SIZE);
        for (k, suffix) in SUFFIXES.iter().enumerate() {
            let id = ConceptId::new(format!("g{g:03}c{k}"));
            members.push(id.clone());
            concepts.push(Concept {
                id,
                term: format!("{stem}{suffix}"),
                gloss: format!("sense {k} of the {stem} family"),
                group_id: group_id.clone(),
                difficulty: rng.random_range(0.2..0.8),
            });
        }
        groups.push(SemanticGroup {
            group_id,
            members,
            base_similarity,
        });
    }
    ConceptPool::new(concepts, groups)
}

/// Group-stratified sample without replacement for one learner: wave w
/// offers one unseen member of every group (group order reshuffled per
/// wave), and the first `concepts_per_learner` offers win.
pub fn assign_concepts(cfg: &SimulationConfig, pool: &ConceptPool) -> Result<Vec<Vec<ConceptId>>> {
    let want = cfg.concepts_per_learner as usize;
    if want > pool.concepts.len() {
        return Err(LectorError::Pool(format!(
            "concepts_per_learner {} exceeds pool of {}",
            want,
            pool.concepts.len()
        )));
    }
    let mut assignments = Vec::with_capacity(cfg.n_learners as usize);
    for learner in 0..cfg.n_learners {
        let mut rng = learner_rng(cfg.seed, learner, LearnerStream::Assignment);
        let shuffled_members: Vec<Vec<ConceptId>> = pool
            .groups
            .iter()
            .map(|g| {
                let mut members = g.members.clone();
                members.shuffle(&mut rng);
                members
            })
            .collect();
        let mut picks = Vec::with_capacity(want);
        let max_wave = shuffled_members.iter().map(Vec::len).max().unwrap_or(0);
        'waves: for wave in 0..max_wave {
            let mut order: Vec<usize> = (0..shuffled_members.len()).collect();
            order.shuffle(&mut rng);
            for gi in order {
                if let Some(id) = shuffled_members[gi].get(wave) {
                    picks.push(id.clone());
                    if picks.len() == want {
                        break 'waves;
                    }
                }
            }
        }
        assignments.push(picks);
    }
    Ok(assignments)
}
