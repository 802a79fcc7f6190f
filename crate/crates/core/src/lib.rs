//! Analytics engine for longitudinal patient-reported symptom cohorts.
//!
//! The crate is organized around one immutable [`CohortDataset`]:
//!
//! * [`ingest`] and [`impute`] build it from CSV and fill gaps by carry-forward;
//! * [`arm`] mines symptom association rules per treatment phase;
//! * [`cluster`] splits patients into high/low burden groups and projects them to 2-D;
//! * [`trajectory`] computes filament-plot polylines;
//! * [`stats`] produces the percentile heatmap, Spearman matrix and prevalence;
//! * [`graph`] turns rules into a laid-out node-link diagram;
//! * [`export`] renders everything to the JSON payloads served to the UI.

pub mod arm;
pub mod cluster;
pub mod error;
pub mod export;
pub mod graph;
pub mod impute;
pub mod ingest;
pub mod model;
pub mod stats;
pub mod symptom;
pub mod timegrid;
pub mod trajectory;

pub use error::{Error, Result, Violation, ViolationKind};
pub use impute::impute;
pub use ingest::{parse_dataset, to_canonical_csv};
pub use model::{CohortDataset, Gender, PatientRecord, RatingSeries, TCategory, Therapy};
pub use symptom::{Category, Symptom};
pub use timegrid::{phase_of, Phase, TimePoint};
