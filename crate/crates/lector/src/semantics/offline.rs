//! Deterministic similarity provider: a within-group prior refined by
//! character-trigram overlap of the terms. Exists so the full pipeline is
//! testable and reproducible without network access.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::semantics::{ProviderTag, SimilarityProvider};
use crate::types::{clamp01, Concept, ConceptPool, GroupId};

#[derive(Debug, Clone)]
pub struct OfflineProvider {
    group_base: HashMap<GroupId, f64>,
    /// Identity digest over the pool content; keeps cache entries from one
    /// generated pool from leaking into runs over a different pool that
    /// happens to reuse the same concept ids.
    pool_digest: String,
}

impl OfflineProvider {
    pub fn for_pool(pool: &ConceptPool) -> Self {
        let group_base = pool
            .groups
            .iter()
            .map(|g| (g.group_id.clone(), g.base_similarity))
            .collect();
        let mut hasher = Sha256::new();
        for g in &pool.groups {
            hasher.update(g.group_id.as_str().as_bytes());
            hasher.update(g.base_similarity.to_le_bytes());
        }
        for c in &pool.concepts {
            hasher.update(c.id.as_str().as_bytes());
            hasher.update(c.term.as_bytes());
            hasher.update(c.group_id.as_str().as_bytes());
        }
        let digest = hasher.finalize();
        let pool_digest = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
        Self {
            group_base,
            pool_digest,
        }
    }

    /// group prior + 0.5 * trigram_jaccard * headroom, clamped to [0, 1].
    pub fn offline_similarity(&self, a: &Concept, b: &Concept) -> f64 {
        let group_term = if a.group_id == b.group_id {
            self.group_base.get(&a.group_id).copied().unwrap_or(0.0)
        } else {
            0.0
        };
        clamp01(group_term + 0.5 * trigram_jaccard(&a.term, &b.term) * (1.0 - group_term))
    }
}

impl SimilarityProvider for OfflineProvider {
    fn provider_id(&self) -> String {
        format!("offline-{}", self.pool_digest)
    }

    fn model_id(&self) -> String {
        "trigram-v1".to_owned()
    }

    fn tag(&self) -> ProviderTag {
        ProviderTag::Offline
    }

    fn score(&self, a: &Concept, b: &Concept) -> Result<f64> {
        Ok(self.offline_similarity(a, b))
    }
}

/// Jaccard similarity of the character-trigram multisets of the lowercased
/// strings. Two strings too short to yield any trigram compare equal iff
/// their lowercased forms are equal.
pub fn trigram_jaccard(a: &str, b: &str) -> f64 {
    let ta = trigram_counts(a);
    let tb = trigram_counts(b);
    if ta.is_empty() && tb.is_empty() {
        return if a.to_lowercase() == b.to_lowercase() {
            1.0
        } else {
            0.0
        };
    }
    let mut intersection = 0u32;
    let mut union = 0u32;
    for (tri, &ca) in &ta {
        let cb = tb.get(tri).copied().unwrap_or(0);
        intersection += ca.min(cb);
        union += ca.max(cb);
    }
    for (tri, &cb) in &tb {
        if !ta.contains_key(tri) {
            union += cb;
        }
    }
    f64::from(intersection) / f64::from(union)
}

fn trigram_counts(s: &str) -> HashMap<String, u32> {
    let chars: Vec<char> = s.to_lowercase().chars().collect();
    let mut counts = HashMap::new();
    for window in chars.windows(3) {
        *counts.entry(window.iter().collect::<String>()).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Concept, SemanticGroup};
    use proptest::prelude::*;

    fn concept(id: &str, term: &str, group: &str) -> Concept {
        Concept {
            id: id.into(),
            term: term.into(),
            gloss: format!("meaning of {term}"),
            group_id: group.into(),
            difficulty: 0.5,
        }
    }

    fn provider_with_group(group: &str, base: f64) -> OfflineProvider {
        let pool = ConceptPool {
            concepts: vec![],
            groups: vec![
                SemanticGroup {
                    group_id: group.into(),
                    members: vec!["placeholder".into()],
                    base_similarity: base,
                },
                SemanticGroup {
                    group_id: "other".into(),
                    members: vec!["placeholder2".into()],
                    base_similarity: 0.6,
                },
            ],
        };
        OfflineProvider::for_pool(&pool)
    }

    /// Independent trigram-Jaccard oracle: brute-force multiset matching
    /// over explicitly enumerated trigram lists.
    fn oracle_jaccard(a: &str, b: &str) -> f64 {
        let list = |s: &str| -> Vec<String> {
            let cs: Vec<char> = s.to_lowercase().chars().collect();
            (0..cs.len().saturating_sub(2))
                .map(|i| cs[i..i + 3].iter().collect())
                .collect()
        };
        let ta = list(a);
        let mut tb = list(b);
        if ta.is_empty() && tb.is_empty() {
            return if a.to_lowercase() == b.to_lowercase() {
                1.0
            } else {
                0.0
            };
        }
        let total = ta.len() + tb.len();
        let mut matched = 0usize;
        for tri in &ta {
            if let Some(pos) = tb.iter().position(|t| t == tri) {
                tb.remove(pos);
                matched += 1;
            }
        }
        // |A ∩ B| = matched, |A ∪ B| = |A| + |B| - matched
        matched as f64 / (total - matched) as f64
    }

    #[test]
    fn banana_bananas_matches_brute_force() {
        // banana: ban ana nan ana; bananas: ban ana nan ana nas
        // intersection 4, union 5 -> J = 0.8
        let j = oracle_jaccard("banana", "bananas");
        assert!((j - 0.8).abs() < 1e-12);
        assert!((trigram_jaccard("banana", "bananas") - j).abs() < 1e-12);

        let p = provider_with_group("g", 0.8);
        let a = concept("a", "banana", "other");
        let b = concept("b", "bananas", "g");
        // different groups -> 0.5 * J = 0.4
        assert!((p.offline_similarity(&a, &b) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn same_group_disjoint_trigrams_returns_base() {
        let p = provider_with_group("g", 0.8);
        let a = concept("a", "xyz", "g");
        let b = concept("b", "abc", "g");
        assert_eq!(p.offline_similarity(&a, &b), 0.8);
    }

    #[test]
    fn identical_terms_same_group_gets_headroom_bonus() {
        let p = provider_with_group("g", 0.8);
        let a = concept("a", "lumen", "g");
        let b = concept("b", "lumen", "g");
        // 0.8 + 0.5 * 1.0 * 0.2 = 0.9
        assert!((p.offline_similarity(&a, &b) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn disjoint_terms_different_groups_is_zero() {
        let p = provider_with_group("g", 0.8);
        let a = concept("a", "xyz", "other");
        let b = concept("b", "abc", "g");
        assert_eq!(p.offline_similarity(&a, &b), 0.0);
    }

    #[test]
    fn short_terms_fall_back_to_equality() {
        assert_eq!(trigram_jaccard("ab", "ab"), 1.0);
        assert_eq!(trigram_jaccard("ab", "cd"), 0.0);
        assert_eq!(trigram_jaccard("ab", "abc"), 0.0);
    }

    proptest! {
        #[test]
        fn jaccard_matches_oracle(a in "[a-d]{0,8}", b in "[a-d]{0,8}") {
            let expected = oracle_jaccard(&a, &b);
            let got = trigram_jaccard(&a, &b);
            prop_assert!((expected - got).abs() < 1e-12);
        }

        #[test]
        fn offline_similarity_symmetric_and_bounded(
            ta in "[a-f]{1,10}",
            tb in "[a-f]{1,10}",
            same_group in proptest::bool::ANY,
            base in 0.0..=1.0f64,
        ) {
            let p = provider_with_group("g", base);
            let ga = if same_group { "g" } else { "other" };
            let a = concept("a", &ta, ga);
            let b = concept("b", &tb, "g");
            let ab = p.offline_similarity(&a, &b);
            let ba = p.offline_similarity(&b, &a);
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
