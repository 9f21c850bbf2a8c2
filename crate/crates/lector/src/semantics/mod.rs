//! Pairwise semantic similarity and the interference matrix built from it.
//!
//! Two interchangeable providers sit behind a persistent cache: a
//! deterministic offline scorer (group prior + trigram overlap) and an
//! external LLM judge. The matrix is symmetric with a zero diagonal; each
//! unordered pair is scored once.

pub mod cache;
pub mod llm;
pub mod offline;
pub mod prompt;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use cache::{CacheStats, SimilarityCache};
pub use llm::{HttpTransport, LlmProvider, LlmSettings, LlmTransport};
pub use offline::{trigram_jaccard, OfflineProvider};
pub use prompt::{construct_prompt, parse_similarity_response, PromptSpec};

use crate::error::{LectorError, Result};
use crate::types::{clamp01, Concept, ConceptId};

/// Where a similarity value came from. `Constant` marks the provider-free
/// self-similarity convention phi(c, c) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderTag {
    Offline,
    Llm,
    Cache,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    pub provider_tag: ProviderTag,
}

/// A pairwise similarity scorer with a stable identity for cache keys.
pub trait SimilarityProvider: Send + Sync {
    fn provider_id(&self) -> String;
    fn model_id(&self) -> String;
    fn tag(&self) -> ProviderTag;
    fn score(&self, a: &Concept, b: &Concept) -> Result<f64>;
}

/// Similarity for one pair, via the cache. Self-similarity is the constant
/// 1.0 and never touches the provider or the cache.
pub fn similarity(
    a: &Concept,
    b: &Concept,
    provider: &dyn SimilarityProvider,
    cache: &SimilarityCache,
) -> Result<SimilarityScore> {
    if a.id == b.id {
        return Ok(SimilarityScore {
            value: 1.0,
            provider_tag: ProviderTag::Constant,
        });
    }
    cache.get_or_compute(a, b, provider)
}

/// Symmetric pairwise interference with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceMatrix {
    pub concept_ids: Vec<ConceptId>,
    pub entries: Vec<Vec<f64>>,
}

impl InterferenceMatrix {
    /// All-zeros matrix over the given concepts (semantic-blind ablation).
    pub fn zeros(concept_ids: Vec<ConceptId>) -> Self {
        let n = concept_ids.len();
        Self {
            concept_ids,
            entries: vec![vec![0.0; n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.concept_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concept_ids.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn index_of(&self, id: &ConceptId) -> Option<usize> {
        self.concept_ids.iter().position(|c| c == id)
    }
}

/// Builds the full matrix: exactly n(n-1)/2 provider-or-cache lookups,
/// one per unordered pair.
pub fn build_matrix(
    concepts: &[Concept],
    provider: &dyn SimilarityProvider,
    cache: &SimilarityCache,
) -> Result<InterferenceMatrix> {
    let mut seen = HashSet::new();
    for c in concepts {
        if !seen.insert(&c.id) {
            return Err(LectorError::Pool(format!(
                "duplicate concept id {} in matrix build",
                c.id
            )));
        }
    }
    let n = concepts.len();
    let mut entries = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let score = cache.get_or_compute(&concepts[i], &concepts[j], provider)?;
            entries[i][j] = score.value;
            entries[j][i] = score.value;
        }
    }
    Ok(InterferenceMatrix {
        concept_ids: concepts.iter().map(|c| c.id.clone()).collect(),
        entries,
    })
}

/// Mean interference of `target` against the active set (target excluded);
/// 0 for an empty set.
pub fn interference_pressure(
    matrix: &InterferenceMatrix,
    target: usize,
    active: &[usize],
) -> Result<f64> {
    let n = matrix.len();
    if target >= n {
        return Err(LectorError::IndexOutOfBounds {
            index: target,
            size: n,
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for &k in active {
        if k >= n {
            return Err(LectorError::IndexOutOfBounds { index: k, size: n });
        }
        if k == target {
            continue;
        }
        sum += matrix.entry(target, k);
        count += 1;
    }
    if count == 0 {
        return Ok(0.0);
    }
    Ok(clamp01(sum / count as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ConceptPool, SemanticGroup};
    use proptest::prelude::*;
    use std::collections::HashMap;
    use std::sync::atomic::{AtomicU64, Ordering};

    fn concept(id: &str, term: &str, group: &str) -> Concept {
        Concept {
            id: id.into(),
            term: term.into(),
            gloss: format!("meaning of {term}"),
            group_id: group.into(),
            difficulty: 0.5,
        }
    }

    struct MapStub {
        values: HashMap<(String, String), f64>,
        calls: AtomicU64,
    }

    impl MapStub {
        fn new(pairs: &[(&str, &str, f64)]) -> Self {
            let mut values = HashMap::new();
            for (a, b, v) in pairs {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                values.insert((lo.to_string(), hi.to_string()), *v);
            }
            Self {
                values,
                calls: AtomicU64::new(0),
            }
        }
    }

    impl SimilarityProvider for MapStub {
        fn provider_id(&self) -> String {
            "stub".into()
        }
        fn model_id(&self) -> String {
            "m".into()
        }
        fn tag(&self) -> ProviderTag {
            ProviderTag::Offline
        }
        fn score(&self, a: &Concept, b: &Concept) -> Result<f64> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            let (lo, hi) = if a.id.as_str() <= b.id.as_str() {
                (a.id.to_string(), b.id.to_string())
            } else {
                (b.id.to_string(), a.id.to_string())
            };
            Ok(*self.values.get(&(lo, hi)).expect("unexpected pair"))
        }
    }

    #[test]
    fn self_similarity_is_constant_one_without_provider_calls() {
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[]);
        let a = concept("a", "alpha", "g");
        let score = similarity(&a, &a, &stub, &cache).unwrap();
        assert_eq!(score.value, 1.0);
        assert_eq!(score.provider_tag, ProviderTag::Constant);
        assert_eq!(stub.calls.load(Ordering::SeqCst), 0);
        assert_eq!(cache.stats().provider_calls, 0);
    }

    #[test]
    fn second_lookup_hits_cache_in_either_order() {
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[("a", "b", 0.7)]);
        let (a, b) = (concept("a", "x", "g"), concept("b", "y", "g"));
        let first = similarity(&a, &b, &stub, &cache).unwrap();
        let second = similarity(&b, &a, &stub, &cache).unwrap();
        assert_eq!(first.value, 0.7);
        assert_eq!(second.value, 0.7);
        assert_eq!(second.provider_tag, ProviderTag::Cache);
        assert_eq!(stub.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn single_concept_matrix_is_zero() {
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[]);
        let m = build_matrix(&[concept("a", "x", "g")], &stub, &cache).unwrap();
        assert_eq!(m.entries, vec![vec![0.0]]);
        assert_eq!(stub.calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn two_concept_matrix_is_symmetric() {
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[("a", "b", 0.7)]);
        let m = build_matrix(
            &[concept("a", "x", "g"), concept("b", "y", "g")],
            &stub,
            &cache,
        )
        .unwrap();
        assert_eq!(m.entries, vec![vec![0.0, 0.7], vec![0.7, 0.0]]);
    }

    #[test]
    fn three_concept_matrix_places_each_pair() {
        // pairs enumerated by hand: (a,b)=0.1, (a,c)=0.2, (b,c)=0.3
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[("a", "b", 0.1), ("a", "c", 0.2), ("b", "c", 0.3)]);
        let m = build_matrix(
            &[
                concept("a", "x", "g"),
                concept("b", "y", "g"),
                concept("c", "z", "g"),
            ],
            &stub,
            &cache,
        )
        .unwrap();
        assert_eq!(
            m.entries,
            vec![
                vec![0.0, 0.1, 0.2],
                vec![0.1, 0.0, 0.3],
                vec![0.2, 0.3, 0.0],
            ]
        );
        assert_eq!(stub.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[]);
        let result = build_matrix(
            &[concept("a", "x", "g"), concept("a", "y", "g")],
            &stub,
            &cache,
        );
        assert!(result.is_err());
    }

    #[test]
    fn rebuild_hits_cache_and_matches_exactly() {
        let cache = SimilarityCache::in_memory();
        let stub = MapStub::new(&[("a", "b", 0.1), ("a", "c", 0.2), ("b", "c", 0.3)]);
        let concepts = [
            concept("a", "x", "g"),
            concept("b", "y", "g"),
            concept("c", "z", "g"),
        ];
        let m1 = build_matrix(&concepts, &stub, &cache).unwrap();
        let calls_after_first = stub.calls.load(Ordering::SeqCst);
        let m2 = build_matrix(&concepts, &stub, &cache).unwrap();
        assert_eq!(stub.calls.load(Ordering::SeqCst), calls_after_first);
        assert_eq!(
            serde_json::to_vec(&m1).unwrap(),
            serde_json::to_vec(&m2).unwrap()
        );
    }

    #[test]
    fn pressure_base_cases() {
        let m = InterferenceMatrix {
            concept_ids: vec!["a".into(), "b".into(), "c".into()],
            entries: vec![
                vec![0.0, 0.2, 0.6],
                vec![0.2, 0.0, 0.5],
                vec![0.6, 0.5, 0.0],
            ],
        };
        assert_eq!(interference_pressure(&m, 0, &[]).unwrap(), 0.0);
        assert_eq!(interference_pressure(&m, 0, &[1]).unwrap(), 0.2);
        assert!((interference_pressure(&m, 0, &[1, 2]).unwrap() - 0.4).abs() < 1e-12);
        // target inside the active set is ignored
        assert_eq!(interference_pressure(&m, 0, &[0, 1]).unwrap(), 0.2);
        assert!(interference_pressure(&m, 9, &[]).is_err());
        assert!(interference_pressure(&m, 0, &[9]).is_err());
    }

    fn random_pool(n_groups: usize, terms: Vec<String>, bases: Vec<f64>) -> ConceptPool {
        let mut concepts = Vec::new();
        let mut groups = Vec::new();
        for g in 0..n_groups {
            let gid = format!("g{g}");
            let mut members = Vec::new();
            for (i, term) in terms.iter().enumerate() {
                if i % n_groups == g {
                    let cid = format!("c{i}");
                    members.push(ConceptId::new(cid.clone()));
                    concepts.push(Concept {
                        id: cid.as_str().into(),
                        term: term.clone(),
                        gloss: format!("meaning {i}"),
                        group_id: gid.as_str().into(),
                        difficulty: 0.5,
                    });
                }
            }
            if !members.is_empty() {
                groups.push(SemanticGroup {
                    group_id: gid.as_str().into(),
                    members,
                    base_similarity: bases[g % bases.len()],
                });
            }
        }
        ConceptPool { concepts, groups }
    }

    proptest! {
        #[test]
        fn matrix_symmetry_zero_diagonal_range(
            terms in proptest::collection::vec("[a-e]{2,8}", 2..10),
            n_groups in 1usize..4,
            bases in proptest::collection::vec(0.0..=1.0f64, 1..4),
        ) {
            let unique: Vec<String> = terms;
            let pool = random_pool(n_groups, unique, bases);
            let provider = OfflineProvider::for_pool(&pool);
            let cache = SimilarityCache::in_memory();
            let m = build_matrix(&pool.concepts, &provider, &cache).unwrap();
            let n = m.len();
            for i in 0..n {
                prop_assert_eq!(m.entry(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(m.entry(i, j), m.entry(j, i));
                    prop_assert!((0.0..=1.0).contains(&m.entry(i, j)));
                }
            }
        }

        #[test]
        fn pressure_monotone_under_high_entry_addition(
            entries in proptest::collection::vec(0.0..=1.0f64, 3..8),
        ) {
            // Matrix row 0 carries the generated entries; adding an index
            // whose entry is >= the current mean never lowers the pressure.
            let n = entries.len() + 1;
            let mut rows = vec![vec![0.0; n]; n];
            for (j, &v) in entries.iter().enumerate() {
                rows[0][j + 1] = v;
                rows[j + 1][0] = v;
            }
            let m = InterferenceMatrix {
                concept_ids: (0..n).map(|i| ConceptId::new(format!("c{i}"))).collect(),
                entries: rows,
            };
            let mut active: Vec<usize> = vec![1];
            for cand in 2..n {
                let before = interference_pressure(&m, 0, &active).unwrap();
                if m.entry(0, cand) >= before {
                    let mut extended = active.clone();
                    extended.push(cand);
                    let after = interference_pressure(&m, 0, &extended).unwrap();
                    prop_assert!(after + 1e-12 >= before);
                    active = extended;
                }
            }
        }
    }
}
