//! HTTP JSON service over the cohort analytics engine.
//!
//! All routes live under `/api/v1`:
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/datasets` | ingest `{name, patients_csv, ratings_csv}` |
//! | GET | `/datasets`, `/datasets/{id}` | dataset handles |
//! | DELETE | `/datasets/{id}` | remove a dataset |
//! | GET | `/datasets/{id}/clusters` | `timepoint`, `symptoms`, `k` |
//! | GET | `/datasets/{id}/rules` | `phase`, `min_support`, `min_lift`, `top_k`, `max_size`, `presence_threshold`, `merge_baseline`, `seed` |
//! | GET | `/datasets/{id}/filaments` | `symptom`, `mode`, `patients`, `highlight`, `phase_highlight` |
//! | GET | `/datasets/{id}/heatmap` | `patient_id` |
//! | GET | `/datasets/{id}/correlations` | `timepoint`, `symptom` |
//! | GET | `/datasets/{id}/patients/{pid}` | |
//!
//! Analytics responses carry an `ETag` (SHA-256 of the body) and honour
//! `If-None-Match`.

pub mod app;
pub mod cache;
pub mod config;
pub mod error;
pub mod query;
pub mod store;

use std::sync::Arc;

pub use app::{router, AppState};
pub use config::ServerConfig;
pub use error::ApiError;
pub use query::Cohort;

/// Binds and serves until Ctrl-C.
pub async fn serve(config: ServerConfig) -> std::io::Result<()> {
    let state = Arc::new(AppState::open(&config)?);
    let app = router(state, &config.cors_origins);
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, data = %config.data_dir.display(), "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
