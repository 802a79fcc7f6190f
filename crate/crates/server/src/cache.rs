//! Bounded cache of rendered response bodies.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use sha2::{Digest, Sha256};

/// A response body and its entity tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub body: String,
    pub etag: String,
}

impl Rendered {
    pub fn new(body: String) -> Rendered {
        let etag = format!("\"{}\"", hex::encode(Sha256::digest(body.as_bytes())));
        Rendered { body, etag }
    }
}

type Entries = LruCache<(String, String), Arc<Rendered>>;

/// Keyed by `(dataset_id, endpoint, canonical params)`. A capacity of zero
/// disables caching.
#[derive(Debug)]
pub struct ResultCache {
    inner: Option<Mutex<Entries>>,
}

impl ResultCache {
    pub fn new(capacity: usize) -> ResultCache {
        ResultCache {
            inner: NonZeroUsize::new(capacity).map(|c| Mutex::new(LruCache::new(c))),
        }
    }

    pub fn get(&self, dataset_id: &str, key: &str) -> Option<Arc<Rendered>> {
        let inner = self.inner.as_ref()?;
        inner.lock().expect("cache lock").get(&(dataset_id.to_string(), key.to_string())).cloned()
    }

    pub fn insert(&self, dataset_id: &str, key: &str, value: Arc<Rendered>) {
        if let Some(inner) = &self.inner {
            inner.lock().expect("cache lock").put((dataset_id.to_string(), key.to_string()), value);
        }
    }

    pub fn evict_dataset(&self, dataset_id: &str) {
        if let Some(inner) = &self.inner {
            let mut cache = inner.lock().expect("cache lock");
            let doomed: Vec<_> = cache.iter().filter(|((d, _), _)| d == dataset_id).map(|(k, _)| k.clone()).collect();
            for k in doomed {
                cache.pop(&k);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.inner.as_ref().map_or(0, |c| c.lock().expect("cache lock").len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_least_recently_used() {
        let c = ResultCache::new(2);
        for k in ["a", "b", "c"] {
            c.insert("d", k, Arc::new(Rendered::new(k.into())));
        }
        assert!(c.get("d", "a").is_none());
        assert_eq!(c.get("d", "c").unwrap().body, "c");
        c.evict_dataset("d");
        assert!(c.is_empty());
    }

    #[test]
    fn zero_capacity_disables() {
        let c = ResultCache::new(0);
        c.insert("d", "a", Arc::new(Rendered::new("x".into())));
        assert!(c.get("d", "a").is_none());
    }

    #[test]
    fn etag_is_body_hash() {
        assert_eq!(Rendered::new("{}".into()), Rendered::new("{}".into()));
        assert_ne!(Rendered::new("{}".into()).etag, Rendered::new("[]".into()).etag);
    }
}
