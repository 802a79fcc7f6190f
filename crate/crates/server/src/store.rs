//! Content-addressed dataset store.
//!
//! Layout under the data directory:
//!
//! ```text
//! datasets/{dataset_id}/patients.csv   canonical form
//! datasets/{dataset_id}/ratings.csv    canonical form
//! datasets/{dataset_id}/manifest.json  DatasetHandle
//! tmp/                                 staging area, cleared on open
//! ```
//!
//! A dataset becomes visible only after its staging directory has been
//! renamed into `datasets/`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use symcohort_core::ingest::{PATIENTS_FILE, RATINGS_FILE};
use symcohort_core::symptom::MANIFEST_VERSION;
use symcohort_core::{parse_dataset, to_canonical_csv};

use crate::error::ApiError;
use crate::query::Cohort;

const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetStatus {
    Ingesting,
    Ready,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetHandle {
    pub dataset_id: String,
    pub name: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub patient_count: usize,
    pub status: DatasetStatus,
    pub manifest_version: u32,
}

#[derive(Debug)]
pub struct StoredDataset {
    pub handle: DatasetHandle,
    pub cohort: Cohort,
}

/// Hex SHA-256 over the canonical CSV pair.
pub fn dataset_id(patients_csv: &str, ratings_csv: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("symptom-manifest-v{MANIFEST_VERSION}\n"));
    h.update((patients_csv.len() as u64).to_le_bytes());
    h.update(patients_csv);
    h.update(ratings_csv);
    hex::encode(h.finalize())
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    datasets: RwLock<BTreeMap<String, Arc<StoredDataset>>>,
    ingest_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    staging_counter: AtomicU64,
}

impl Store {
    /// Opens (or creates) a store and loads every persisted dataset.
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Store> {
        let root = root.into();
        fs::create_dir_all(root.join("datasets"))?;
        let tmp = root.join("tmp");
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir_all(&tmp)?;
        let mut datasets = BTreeMap::new();
        for entry in fs::read_dir(root.join("datasets"))? {
            let path = entry?.path();
            match load(&path) {
                Ok(d) => {
                    datasets.insert(d.handle.dataset_id.clone(), Arc::new(d));
                }
                Err(e) => tracing::warn!(path = %path.display(), error = %e, "skipping unreadable dataset"),
            }
        }
        Ok(Store {
            root,
            datasets: RwLock::new(datasets),
            ingest_locks: Mutex::new(HashMap::new()),
            staging_counter: AtomicU64::new(0),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn get(&self, id: &str) -> Option<Arc<StoredDataset>> {
        self.datasets.read().expect("store lock").get(id).cloned()
    }

    pub fn list(&self) -> Vec<DatasetHandle> {
        self.datasets.read().expect("store lock").values().map(|d| d.handle.clone()).collect()
    }

    /// Validates, imputes and persists a dataset. Returns the handle and
    /// whether a new dataset was created (identical content maps to the
    /// existing one).
    pub fn ingest(&self, name: &str, patients_csv: &str, ratings_csv: &str) -> Result<(DatasetHandle, bool), ApiError> {
        let raw = parse_dataset(patients_csv, ratings_csv)?;
        let (patients, ratings) = to_canonical_csv(&raw);
        let id = dataset_id(&patients, &ratings);

        let lock = self.ingest_locks.lock().expect("lock table").entry(id.clone()).or_default().clone();
        let _guard = lock.lock().expect("ingest lock");
        if let Some(existing) = self.get(&id) {
            return Ok((existing.handle.clone(), false));
        }

        let cohort = Cohort::from_raw(raw)?;
        let handle = DatasetHandle {
            dataset_id: id.clone(),
            name: name.to_string(),
            created_at: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            patient_count: cohort.raw.len(),
            status: DatasetStatus::Ready,
            manifest_version: MANIFEST_VERSION,
        };
        let staging = self.staging_dir(&id);
        let written = (|| -> io::Result<()> {
            fs::create_dir_all(&staging)?;
            fs::write(staging.join(PATIENTS_FILE), &patients)?;
            fs::write(staging.join(RATINGS_FILE), &ratings)?;
            let manifest = serde_json::to_vec_pretty(&handle).map_err(io::Error::other)?;
            fs::write(staging.join(MANIFEST_FILE), manifest)?;
            fs::rename(&staging, self.dataset_dir(&id))
        })();
        if let Err(e) = written {
            let _ = fs::remove_dir_all(&staging);
            return Err(e.into());
        }
        tracing::info!(dataset_id = %id, patients = handle.patient_count, "dataset ingested");
        self.datasets
            .write()
            .expect("store lock")
            .insert(id, Arc::new(StoredDataset { handle: handle.clone(), cohort }));
        Ok((handle, true))
    }

    /// Removes a dataset. Returns false when it did not exist.
    pub fn delete(&self, id: &str) -> Result<bool, ApiError> {
        let Some(lock) = self.get(id).map(|_| {
            self.ingest_locks.lock().expect("lock table").entry(id.to_string()).or_default().clone()
        }) else {
            return Ok(false);
        };
        let _guard = lock.lock().expect("ingest lock");
        if self.datasets.write().expect("store lock").remove(id).is_none() {
            return Ok(false);
        }
        let doomed = self.staging_dir(id);
        fs::rename(self.dataset_dir(id), &doomed)?;
        fs::remove_dir_all(&doomed)?;
        Ok(true)
    }

    fn dataset_dir(&self, id: &str) -> PathBuf {
        self.root.join("datasets").join(id)
    }

    fn staging_dir(&self, id: &str) -> PathBuf {
        let n = self.staging_counter.fetch_add(1, Ordering::Relaxed);
        self.root.join("tmp").join(format!("{id}.{}.{n}", std::process::id()))
    }
}

fn load(dir: &Path) -> Result<StoredDataset, ApiError> {
    let manifest = fs::read(dir.join(MANIFEST_FILE))?;
    let handle: DatasetHandle =
        serde_json::from_slice(&manifest).map_err(|e| ApiError::Internal(format!("bad manifest: {e}")))?;
    let patients = fs::read_to_string(dir.join(PATIENTS_FILE))?;
    let ratings = fs::read_to_string(dir.join(RATINGS_FILE))?;
    if dataset_id(&patients, &ratings) != handle.dataset_id {
        return Err(ApiError::Internal("content does not match dataset id".into()));
    }
    let cohort = Cohort::from_csv(&patients, &ratings)?;
    Ok(StoredDataset { handle, cohort })
}
