//! HTTP service over a gallery store.
//!
//! Every error response is `{"error": CODE, "message": TEXT}` where `CODE`
//! is the name of the failing module error, `NotFound` for unknown ids, or
//! `BadRequest` for malformed parameters and bodies.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use lifelines_core::format::DrawingDoc;
use lifelines_core::gallery::GalleryStore;
use lifelines_core::{canonicalize, color_curve, make_morph, MorphDoc, Palette, DEFAULT_FRAMES, DEFAULT_SAMPLES};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::config::ServiceConfig;

pub const DEFAULT_PAGE: usize = 50;
pub const DEFAULT_K: usize = 10;
pub const MAX_K: usize = 100;
pub const MAX_FRAMES: usize = 240;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", format!("no drawing with id {id:?}"))
    }

    fn internal(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Json(json!({ "error": self.code, "message": self.message }));
        (self.status, body).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub struct AppState {
    store: RwLock<GalleryStore>,
    palette: Palette,
}

impl AppState {
    pub fn new(store: GalleryStore, palette: Palette) -> Arc<Self> {
        Arc::new(AppState {
            store: RwLock::new(store),
            palette,
        })
    }

    /// Flushes the gallery log.
    pub fn sync(&self) -> Result<(), lifelines_core::GalleryError> {
        self.store.write().unwrap_or_else(|e| e.into_inner()).sync()
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, GalleryStore> {
        self.store.read().unwrap_or_else(|e| e.into_inner())
    }
}

type Shared = Arc<AppState>;

/// Runs CPU-bound request work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal("Internal", e.to_string()))?
}

fn param<T: std::str::FromStr>(q: &HashMap<String, String>, name: &str) -> ApiResult<Option<T>> {
    q.get(name)
        .map(|v| v.parse().map_err(|_| ApiError::bad_request(format!("invalid {name}: {v:?}"))))
        .transpose()
}

fn required(q: &HashMap<String, String>, name: &str) -> ApiResult<String> {
    q.get(name)
        .cloned()
        .ok_or_else(|| ApiError::bad_request(format!("missing parameter {name}")))
}

async fn post_drawing(State(state): State<Shared>, body: Bytes) -> ApiResult<Response> {
    blocking(move || {
        let text = std::str::from_utf8(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let doc = DrawingDoc::parse(text).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let curve = canonicalize(&doc.to_raw_stroke(), DEFAULT_SAMPLES)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()))?;
        // drawings that cannot be colored are not stored
        let colored = color_curve(&curve, &state.palette)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()))?;
        let mut store = state.store.write().unwrap_or_else(|e| e.into_inner());
        let record = store
            .add_drawing(curve)
            .map_err(|e| ApiError::internal(e.code(), e.to_string()))?;
        log::info!("stored drawing {}", record.id);
        Ok((StatusCode::CREATED, Json(colored.with_record(&record.to_doc()))).into_response())
    })
    .await
}

#[derive(Serialize)]
struct Page {
    offset: usize,
    limit: usize,
    total: usize,
    drawings: Vec<DrawingDoc>,
}

async fn list_drawings(State(state): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult<Json<Page>> {
    let offset = param(&q, "offset")?.unwrap_or(0);
    let limit = param(&q, "limit")?.unwrap_or(DEFAULT_PAGE);
    let store = state.read();
    let page = store
        .list_drawings(offset, limit)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.code(), e.to_string()))?;
    Ok(Json(Page {
        offset,
        limit,
        total: store.len(),
        drawings: page.iter().map(|r| r.to_doc()).collect(),
    }))
}

async fn get_drawing(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let offset: Option<i64> = param(&q, "offset")?;
    blocking(move || {
        let palette = match offset {
            Some(o) => state.palette.with_offset(o),
            None => state.palette.clone(),
        };
        let store = state.read();
        let record = store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
        let colored = color_curve(&record.curve, &palette)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()))?;
        Ok(Json(colored.with_record(&record.to_doc())).into_response())
    })
    .await
}

async fn morph(State(state): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult<Response> {
    let a = required(&q, "a")?;
    let b = required(&q, "b")?;
    let frames = param(&q, "frames")?.unwrap_or(DEFAULT_FRAMES);
    if frames > MAX_FRAMES {
        return Err(ApiError::bad_request(format!("frames must be at most {MAX_FRAMES}")));
    }
    let offset: Option<i64> = param(&q, "offset")?;
    blocking(move || {
        let palette = state.palette.with_offset(offset.unwrap_or(state.palette.offset));
        let (ca, cb) = {
            let store = state.read();
            let ra = store.get(&a).ok_or_else(|| ApiError::not_found(&a))?;
            let rb = store.get(&b).ok_or_else(|| ApiError::not_found(&b))?;
            (ra.curve.clone(), rb.curve.clone())
        };
        let m = make_morph(&ca, &cb, frames, &palette)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()))?;
        Ok(Json(MorphDoc::new(&m, ca.canvas(), palette.offset)).into_response())
    })
    .await
}

#[derive(Serialize)]
struct NeighborDoc {
    id: String,
    distance: f64,
}

#[derive(Serialize)]
struct NearestDoc {
    id: String,
    k: usize,
    neighbors: Vec<NeighborDoc>,
}

async fn nearest(State(state): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult<Response> {
    let id = required(&q, "id")?;
    let k = param(&q, "k")?.unwrap_or(DEFAULT_K);
    if !(1..=MAX_K).contains(&k) {
        return Err(ApiError::bad_request(format!("k must be in 1..={MAX_K}")));
    }
    blocking(move || {
        let store = state.read();
        let query = &store.get(&id).ok_or_else(|| ApiError::not_found(&id))?.curve;
        // the query drawing itself is not its own neighbor
        let neighbors = store
            .nearest(query, k + 1)
            .into_iter()
            .filter(|n| n.record.id != id)
            .take(k)
            .map(|n| NeighborDoc {
                id: n.record.id.clone(),
                distance: n.distance,
            })
            .collect();
        Ok(Json(NearestDoc { id, k, neighbors }).into_response())
    })
    .await
}

#[derive(Serialize)]
struct StatsDoc {
    count: usize,
    max_winding_histogram: BTreeMap<u64, usize>,
    mean_arc_length: f64,
}

async fn stats(State(state): State<Shared>) -> Json<StatsDoc> {
    let s = state.read().stats();
    Json(StatsDoc {
        count: s.count,
        max_winding_histogram: s.max_winding_histogram,
        mean_arc_length: s.mean_arc_length,
    })
}

fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.iter().any(|o| o == "*") {
        return layer.allow_origin(Any);
    }
    let list: Vec<HeaderValue> = origins.iter().filter_map(|o| o.parse().ok()).collect();
    layer.allow_origin(AllowOrigin::list(list))
}

pub fn router(state: Shared, cors_origins: &[String]) -> Router {
    Router::new()
        .route("/drawings", get(list_drawings).post(post_drawing))
        .route("/drawings/{id}", get(get_drawing))
        .route("/morph", get(morph))
        .route("/nearest", get(nearest))
        .route("/stats", get(stats))
        .layer(cors(cors_origins))
        .with_state(state)
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot listen on port {port}: {source}")]
    BindFailure { port: u16, source: std::io::Error },
    #[error(transparent)]
    StorageFailure(#[from] lifelines_core::GalleryError),
}

impl ServeError {
    pub fn code(&self) -> &'static str {
        match self {
            ServeError::BindFailure { .. } => "BindFailure",
            ServeError::StorageFailure(e) => e.code(),
        }
    }
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

/// Opens the gallery, serves until interrupted, then flushes the log.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    let store = GalleryStore::open(&config.data)?;
    log::info!("gallery {} holds {} drawings", config.data.display(), store.len());
    let state = AppState::new(store, config.palette.clone());
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port))
        .await
        .map_err(|source| ServeError::BindFailure {
            port: config.port,
            source,
        })?;
    log::info!("listening on port {}", config.port);
    axum::serve(listener, router(state.clone(), &config.cors_origins))
        .with_graceful_shutdown(shutdown_signal())
        .await
        .map_err(|source| ServeError::BindFailure {
            port: config.port,
            source,
        })?;
    log::info!("shutting down");
    state.sync()?;
    Ok(())
}
