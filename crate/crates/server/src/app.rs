use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path, Query as QueryParams, State};
use axum::http::header::{CONTENT_TYPE, ETAG, IF_NONE_MATCH};
use axum::http::{HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::cache::{Rendered, ResultCache};
use crate::config::ServerConfig;
use crate::error::ApiError;
use crate::query::{
    ClustersQuery, CorrelationsQuery, FilamentsQuery, HeatmapQuery, PatientQuery, Query, RulesQuery,
};
use crate::store::Store;

#[derive(Debug)]
pub struct AppState {
    pub store: Store,
    pub cache: ResultCache,
    pub max_upload_bytes: usize,
}

impl AppState {
    pub fn open(config: &ServerConfig) -> std::io::Result<AppState> {
        Ok(AppState {
            store: Store::open(&config.data_dir)?,
            cache: ResultCache::new(config.cache_entries),
            max_upload_bytes: config.max_upload_bytes,
        })
    }

    /// Body for `query` on a dataset, from cache when present.
    pub fn render(&self, dataset_id: &str, query: &Query) -> Result<Arc<Rendered>, ApiError> {
        let key = query.cache_key();
        if let Some(hit) = self.cache.get(dataset_id, &key) {
            return Ok(hit);
        }
        let dataset = self.store.get(dataset_id).ok_or_else(|| ApiError::UnknownDataset(dataset_id.to_string()))?;
        let rendered = Arc::new(Rendered::new(query.run(&dataset.cohort)?));
        self.cache.insert(dataset_id, &key, rendered.clone());
        Ok(rendered)
    }
}

pub fn router(state: Arc<AppState>, cors_origins: &[String]) -> Router {
    let limit = state.max_upload_bytes;
    let api = Router::new()
        .route("/datasets", get(list_datasets).post(ingest))
        .route("/datasets/{id}", get(get_dataset).delete(delete_dataset))
        .route("/datasets/{id}/clusters", get(clusters))
        .route("/datasets/{id}/rules", get(rules))
        .route("/datasets/{id}/filaments", get(filaments))
        .route("/datasets/{id}/heatmap", get(heatmap))
        .route("/datasets/{id}/correlations", get(correlations))
        .route("/datasets/{id}/patients/{pid}", get(patient))
        .layer(DefaultBodyLimit::max(limit));
    let mut app = Router::new().nest("/api/v1", api).with_state(state);
    if !cors_origins.is_empty() {
        let origins: Vec<HeaderValue> = cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
        app = app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::list(origins))
                .allow_methods([Method::GET, Method::POST, Method::DELETE])
                .allow_headers([CONTENT_TYPE, IF_NONE_MATCH])
                .expose_headers([ETAG]),
        );
    }
    app.layer(tower_http::trace::TraceLayer::new_for_http())
}

#[derive(Debug, Deserialize)]
struct IngestRequest {
    #[serde(default)]
    name: String,
    patients_csv: String,
    ratings_csv: String,
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn ingest(State(state): State<Arc<AppState>>, body: Result<Bytes, BytesRejection>) -> Result<Response, ApiError> {
    let body = body.map_err(|e| {
        if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::TooLarge(state.max_upload_bytes)
        } else {
            ApiError::BadBody(e.body_text())
        }
    })?;
    let req: IngestRequest = serde_json::from_slice(&body).map_err(|e| ApiError::BadBody(e.to_string()))?;
    let (handle, created) =
        blocking(move || state.store.ingest(&req.name, &req.patients_csv, &req.ratings_csv)).await?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok((status, Json(handle)).into_response())
}

async fn list_datasets(State(state): State<Arc<AppState>>) -> Response {
    Json(state.store.list()).into_response()
}

async fn get_dataset(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let d = state.store.get(&id).ok_or(ApiError::UnknownDataset(id))?;
    Ok(Json(d.handle.clone()).into_response())
}

async fn delete_dataset(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let st = state.clone();
    let key = id.clone();
    if !blocking(move || st.store.delete(&key)).await? {
        return Err(ApiError::UnknownDataset(id));
    }
    state.cache.evict_dataset(&id);
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn respond(
    state: Arc<AppState>,
    id: String,
    headers: HeaderMap,
    query: impl FnOnce() -> Result<Query, ApiError>,
) -> Result<Response, ApiError> {
    if state.store.get(&id).is_none() {
        return Err(ApiError::UnknownDataset(id));
    }
    let query = query()?;
    let rendered = blocking(move || state.render(&id, &query)).await?;
    let etag = HeaderValue::from_str(&rendered.etag).expect("hex etag");
    let matches = headers
        .get(IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == rendered.etag || t.trim() == "*"));
    if matches {
        return Ok((StatusCode::NOT_MODIFIED, [(ETAG, etag)]).into_response());
    }
    Ok((
        StatusCode::OK,
        [(CONTENT_TYPE, HeaderValue::from_static("application/json")), (ETAG, etag)],
        rendered.body.clone(),
    )
        .into_response())
}

type AppStateRef = State<Arc<AppState>>;
type Params = QueryParams<BTreeMap<String, String>>;

async fn clusters(State(s): AppStateRef, Path(id): Path<String>, h: HeaderMap, QueryParams(p): Params) -> Result<Response, ApiError> {
    respond(s, id, h, || Ok(Query::Clusters(ClustersQuery::parse(&p)?))).await
}

async fn rules(State(s): AppStateRef, Path(id): Path<String>, h: HeaderMap, QueryParams(p): Params) -> Result<Response, ApiError> {
    respond(s, id, h, || Ok(Query::Rules(RulesQuery::parse(&p)?))).await
}

async fn filaments(State(s): AppStateRef, Path(id): Path<String>, h: HeaderMap, QueryParams(p): Params) -> Result<Response, ApiError> {
    respond(s, id, h, || Ok(Query::Filaments(FilamentsQuery::parse(&p)?))).await
}

async fn heatmap(State(s): AppStateRef, Path(id): Path<String>, h: HeaderMap, QueryParams(p): Params) -> Result<Response, ApiError> {
    respond(s, id, h, || Ok(Query::Heatmap(HeatmapQuery::parse(&p)?))).await
}

async fn correlations(State(s): AppStateRef, Path(id): Path<String>, h: HeaderMap, QueryParams(p): Params) -> Result<Response, ApiError> {
    respond(s, id, h, || Ok(Query::Correlations(CorrelationsQuery::parse(&p)?))).await
}

async fn patient(State(s): AppStateRef, Path((id, pid)): Path<(String, String)>, h: HeaderMap) -> Result<Response, ApiError> {
    respond(s, id, h, || Ok(Query::Patient(PatientQuery { patient_id: pid }))).await
}
