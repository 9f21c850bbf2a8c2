//! Persistent append-only similarity cache.
//!
//! One JSON object per line, keyed by (provider id, model id, sorted pair
//! of concept ids). Reads are concurrent; writes are serialized; an
//! uncached pair triggers at most one provider call even under concurrent
//! lookups (per-pair in-flight deduplication).

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{LectorError, Result};
use crate::semantics::{ProviderTag, SimilarityProvider, SimilarityScore};
use crate::types::Concept;

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    key: String,
    value: f64,
    provider_tag: ProviderTag,
    model: String,
}

/// Hit/miss accounting for one process lifetime.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq)]
pub struct CacheStats {
    pub entries: u64,
    pub hits: u64,
    pub misses: u64,
    pub provider_calls: u64,
}

pub struct SimilarityCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, f64>>,
    writer: Mutex<Option<File>>,
    in_flight: Mutex<HashSet<String>>,
    in_flight_done: Condvar,
    hits: AtomicU64,
    misses: AtomicU64,
    provider_calls: AtomicU64,
}

impl SimilarityCache {
    /// Opens (creating if needed) a cache file and loads all entries.
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed: CacheLine = serde_json::from_str(&line).map_err(|e| {
                    LectorError::Config(format!(
                        "unreadable cache {} at line {}: {e}",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                entries.insert(parsed.key, parsed.value);
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            path: Some(path.to_path_buf()),
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(writer)),
            in_flight: Mutex::new(HashSet::new()),
            in_flight_done: Condvar::new(),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            provider_calls: AtomicU64::new(0),
        })
    }

    /// Volatile cache with no backing file.
    pub fn in_memory() -> Self {
        Self {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
            in_flight: Mutex::new(HashSet::new()),
            in_flight_done: Condvar::new(),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            provider_calls: AtomicU64::new(0),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.len() as u64,
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            provider_calls: self.provider_calls.load(Ordering::Relaxed),
        }
    }

    fn key_for(provider: &dyn SimilarityProvider, a: &Concept, b: &Concept) -> String {
        let (lo, hi) = if a.id.as_str() <= b.id.as_str() {
            (&a.id, &b.id)
        } else {
            (&b.id, &a.id)
        };
        format!(
            "{}|{}|{}|{}",
            provider.provider_id(),
            provider.model_id(),
            lo,
            hi
        )
    }

    /// Returns the cached score for the unordered pair, or invokes the
    /// provider exactly once, persists the result, and returns it.
    pub fn get_or_compute(
        &self,
        a: &Concept,
        b: &Concept,
        provider: &dyn SimilarityProvider,
    ) -> Result<SimilarityScore> {
        let key = Self::key_for(provider, a, b);

        loop {
            if let Some(&value) = self.entries.read().unwrap().get(&key) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(SimilarityScore {
                    value,
                    provider_tag: ProviderTag::Cache,
                });
            }
            let mut in_flight = self.in_flight.lock().unwrap();
            if in_flight.contains(&key) {
                // Another worker is computing this pair; wait, then re-check.
                let _guard = self.in_flight_done.wait(in_flight).unwrap();
                continue;
            }
            in_flight.insert(key.clone());
            break;
        }

        self.misses.fetch_add(1, Ordering::Relaxed);
        self.provider_calls.fetch_add(1, Ordering::Relaxed);
        let outcome = provider.score(a, b);

        let result = match outcome {
            Ok(value) => {
                self.entries.write().unwrap().insert(key.clone(), value);
                if let Err(e) = self.append_line(&key, value, provider) {
                    self.release_in_flight(&key);
                    return Err(e);
                }
                Ok(SimilarityScore {
                    value,
                    provider_tag: provider.tag(),
                })
            }
            Err(e) => Err(LectorError::SimilarityUnavailable {
                a: a.id.to_string(),
                b: b.id.to_string(),
                source: Box::new(e),
            }),
        };
        self.release_in_flight(&key);
        result
    }

    fn release_in_flight(&self, key: &str) {
        self.in_flight.lock().unwrap().remove(key);
        self.in_flight_done.notify_all();
    }

    fn append_line(&self, key: &str, value: f64, provider: &dyn SimilarityProvider) -> Result<()> {
        let mut writer = self.writer.lock().unwrap();
        if let Some(file) = writer.as_mut() {
            let line = serde_json::to_string(&CacheLine {
                key: key.to_owned(),
                value,
                provider_tag: provider.tag(),
                model: provider.model_id(),
            })?;
            writeln!(file, "{line}")?;
        }
        Ok(())
    }

    /// Truncates the backing file and forgets all entries and counters.
    pub fn clear(&self) -> Result<()> {
        self.entries.write().unwrap().clear();
        let mut writer = self.writer.lock().unwrap();
        if let Some(path) = &self.path {
            *writer = Some(OpenOptions::new().write(true).truncate(true).open(path)?);
        }
        self.hits.store(0, Ordering::Relaxed);
        self.misses.store(0, Ordering::Relaxed);
        self.provider_calls.store(0, Ordering::Relaxed);
        Ok(())
    }
}
